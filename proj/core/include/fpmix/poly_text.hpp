#ifndef FPMIX_POLY_TEXT_HPP
#define FPMIX_POLY_TEXT_HPP

#include <string>
#include <vector>

#include "fpmix/multilaurent.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

// Text grammar shared by the CLI and serializers:
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' int)?
//   atom   := integer | 'x' | 'x'<digits> | '(' expr ')'
// Univariate input uses the bare variable x; multivariate input uses x1..xN.
UniPoly parse_unipoly(const std::string& text, uint32_t p);
MultiLaurent parse_multilaurent(const std::string& text, uint32_t p, int nvars);

std::string to_string(const UniPoly& u, const std::string& var = "x");
std::string to_string(const MultiLaurent& m, const std::vector<std::string>& names = {});

} // namespace fpmix

#endif

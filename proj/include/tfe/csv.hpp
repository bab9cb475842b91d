#ifndef TFE_CSV_HPP
#define TFE_CSV_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tfe/estimator.hpp"
#include "tfe/simulate.hpp"

namespace tfe {

/// Shortest round-trip decimal form of x; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

/// Header `k,u0sq,xi_T,X_T,Y_T,Z_T,steps`.
void write_functionals_csv(std::ostream& os, std::span<const ModeFunctionals> funcs);
std::vector<ModeFunctionals> read_functionals_csv(std::istream& is);

/// Header `k,t,u,xi`; one row per grid node.
void write_path_csv(std::ostream& os, std::span<const ModePath> paths);

/// Header `rep,n,theta_hat,a_n,b_n,normalized_stat,denominator`. Missing
/// a_n / b_n are written as empty fields.
void write_result_header(std::ostream& os);
void write_result_rows(std::ostream& os, std::size_t rep, const TfeResult& r);

}  // namespace tfe

#endif  // TFE_CSV_HPP

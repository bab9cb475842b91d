#include "tfe/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tfe {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_functionals_csv(std::ostream& os, std::span<const ModeFunctionals> funcs) {
  os << "k,u0sq,xi_T,X_T,Y_T,Z_T,steps\n";
  for (const ModeFunctionals& f : funcs) {
    os << f.k << ',' << format_double(f.u0_sq) << ',' << format_double(f.xi_T) << ','
       << format_double(f.X_T) << ',' << format_double(f.Y_T) << ',' << format_double(f.Z_T)
       << ',' << f.steps << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<ModeFunctionals> read_functionals_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("functionals CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "k,u0sq,xi_T,X_T,Y_T,Z_T,steps") {
    throw std::runtime_error("functionals CSV: unexpected header '" + line + "'");
  }
  std::vector<ModeFunctionals> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 7) {
      throw std::runtime_error("functionals CSV: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " fields");
    }
    ModeFunctionals f;
    f.k = std::stoul(cells[0]);
    f.u0_sq = parse_double(cells[1]);
    f.xi_T = parse_double(cells[2]);
    f.X_T = parse_double(cells[3]);
    f.Y_T = parse_double(cells[4]);
    f.Z_T = parse_double(cells[5]);
    f.steps = std::stoul(cells[6]);
    if (f.k != out.size() + 1) {
      throw std::runtime_error("functionals CSV: modes must be listed as k = 1, 2, ...");
    }
    out.push_back(f);
  }
  return out;
}

void write_path_csv(std::ostream& os, std::span<const ModePath> paths) {
  os << "k,t,u,xi\n";
  for (const ModePath& p : paths) {
    for (std::size_t i = 0; i < p.u.size(); ++i) {
      os << p.k << ',' << format_double(p.t[i]) << ',' << format_double(p.u[i]) << ','
         << format_double(p.xi[i]) << '\n';
    }
  }
}

void write_result_header(std::ostream& os) {
  os << "rep,n,theta_hat,a_n,b_n,normalized_stat,denominator\n";
}

void write_result_rows(std::ostream& os, std::size_t rep, const TfeResult& r) {
  const bool has_bias = r.a.size() == r.theta_hat.size();
  for (std::size_t i = 0; i < r.theta_hat.size(); ++i) {
    os << rep << ',' << r.checkpoints[i] << ',' << format_double(r.theta_hat[i]) << ',';
    if (has_bias) {
      os << format_double(r.a[i]) << ',' << format_double(r.b[i]) << ','
         << format_double(r.normalized_stat[i]);
    } else {
      os << ",,";
    }
    os << ',' << format_double(r.denominator[i]) << '\n';
  }
}

}  // namespace tfe

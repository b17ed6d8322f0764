#include "qfb/csv.hpp"

#include <cmath>
#include <cstdio>

namespace qfb::csv {

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string number(const std::optional<double>& x) { return x ? number(*x) : std::string(); }

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

void write_trajectory(std::ostream& os, const TrajectoryResult& tr) {
  const int n = tr.states.empty() ? 0 : tr.states.front().dim();
  std::vector<std::string> header{"t"};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::string base = "rho_" + std::to_string(i) + std::to_string(j);
      header.push_back(base + "_re");
      header.push_back(base + "_im");
    }
  }
  header.insert(header.end(), {"purity", "overlap", "dy"});
  write_row(os, header);

  for (std::size_t g = 0; g < tr.times.size(); ++g) {
    std::vector<std::string> row{number(tr.times[g])};
    const ComplexMatrix& m = tr.states[g].matrix();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        row.push_back(number(m(i, j).real()));
        row.push_back(number(m(i, j).imag()));
      }
    }
    row.push_back(number(tr.purities[g]));
    row.push_back(number(tr.overlaps[g]));
    row.push_back(g == 0 ? std::string() : number(tr.records[g - 1]));
    write_row(os, row);
  }
}

void write_theta_table(std::ostream& os, const std::vector<ThetaRow>& rows) {
  write_row(os, {"theta", "purity_mean", "purity_se", "overlap_mean", "overlap_se"});
  for (const ThetaRow& r : rows) {
    write_row(os, {number(r.theta), number(r.purity.mean), number(r.purity.se),
                   number(r.overlap.mean), number(r.overlap.se)});
  }
}

void write_fig1(std::ostream& os, const std::vector<ThetaSweepRow>& rows) {
  write_row(os, {"theta", "i_f_p", "n_e_p", "n_e_v"});
  for (const ThetaSweepRow& r : rows) {
    write_row(os, {number(r.theta), number(r.i_f_p), number(r.n_e_p), number(r.n_e_v)});
  }
}

}  // namespace qfb::csv

#pragma once

// CSV serialization of experiment outputs. Numbers use 17 significant digits,
// '.' decimals and comma separators, with a header row.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qfb/ensemble.hpp"
#include "qfb/metrics.hpp"
#include "qfb/sde.hpp"

namespace qfb::csv {

/// "%.17g"; non-finite values print as nan, inf or -inf.
std::string number(double x);
/// Empty string when absent.
std::string number(const std::optional<double>& x);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

/// t, Re/Im of each rho entry (row-major, rho_ij_re, rho_ij_im), purity,
/// overlap, dy. The first row has an empty dy field.
void write_trajectory(std::ostream& os, const TrajectoryResult& tr);

/// theta, purity_mean, purity_se, overlap_mean, overlap_se.
void write_theta_table(std::ostream& os, const std::vector<ThetaRow>& rows);

/// theta, i_f_p, n_e_p, n_e_v.
void write_fig1(std::ostream& os, const std::vector<ThetaSweepRow>& rows);

}  // namespace qfb::csv

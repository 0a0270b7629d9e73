// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qbm/diagnostics.hpp"
#include "qbm/gaussian.hpp"
#include "qbm/grid.hpp"
#include "qbm/model.hpp"
#include "qbm/phasespace.hpp"
#include "qbm/qsd.hpp"
#include "qbm/reconstruction.hpp"

namespace qbm::io {

// %.17g: round-trips every double.
std::string number(double v);

// x,y,re,im rows, x outer (C order over (i, j)).
void write_csv(std::ostream& os, const DensityGrid& rho);
// p,q,value rows, p outer.
void write_csv(std::ostream& os, const PhaseGrid& g);
// Box metadata that goes alongside a grid CSV.
std::string header_json(const DensityGrid& rho);
std::string header_json(const PhaseGrid& g);

// Read back a grid given its header. Throws DomainError ("csv") on a
// malformed line, a count mismatch or nodes off the header's axes.
DensityGrid read_density(std::istream& csv, const std::string& header);
PhaseGrid read_phase(std::istream& csv, const std::string& header);

// t,mean_x,mean_p,dx,dp,seed; trajectories one after another.
void write_trajectories_csv(std::ostream& os, const EnsembleSummary& e);

// [{re_A, im_A, q0, re_L, im_L, p0}, ...]
std::string to_json(const GaussianState& s);
GaussianState state_from_json(const std::string& text);

std::string to_json(const DerivedScales& s);  // {alpha, a_sq, D, t_loc}
std::string to_json(const ResidualReport& r);
std::string to_json(const DecoherenceFit& f);
std::string to_json(const PositivityReport& r);
std::string to_json(const LadderPoint& p);  // {alpha_t, trace_distance, min_eigenvalue, f_min}

}  // namespace qbm::io

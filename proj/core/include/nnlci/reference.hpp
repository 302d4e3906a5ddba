#pragma once

#include "nnlci/conservation_law.hpp"
#include "nnlci/grid.hpp"

#include <span>
#include <string>
#include <vector>

namespace nnlci {

enum class RiemannFlux { hll, hllc };

std::string to_string(RiemannFlux f);
RiemannFlux parse_riemann_flux(const std::string& text);

/// Slope limiter of the MUSCL reconstruction. minmod is the most
/// dissipative; mc and superbee keep contact discontinuities sharper.
enum class Limiter { minmod, mc, superbee };

std::string to_string(Limiter l);
Limiter parse_limiter(const std::string& text);

struct ReferenceOptions {
  double cfl = 0.4;
  Limiter limiter = Limiter::minmod;
  /// hllc restores the contact wave for EulerLaw and falls back to hll for
  /// any other law.
  RiemannFlux flux = RiemannFlux::hll;
};

/// Identifier written into file metadata for fields produced by the
/// reference solver.
std::string reference_scheme_id(const ReferenceOptions& opts);

/// Conserved cell averages on the cells of `grid` (ghost width 2).
struct CellField {
  GridSpec grid;
  double time = 0.0;
  StateArray cons;
};

/// Second-order finite-volume solver: minmod-limited MUSCL reconstruction of
/// the law's primitive variables, two-wave HLL flux (optionally HLLC), and
/// two-stage SSP Runge-Kutta with an adaptive step at opts.cfl. Returns the
/// averages at each requested time (ascending, all > 0).
std::vector<CellField> reference_solve(const ConservationLaw& law, const GridSpec& g,
                                       const StateArray& ic_cells, std::span<const double> times,
                                       const ReferenceOptions& opts = {});

CellField reference_solve(const ConservationLaw& law, const GridSpec& g,
                          const StateArray& ic_cells, double t_final,
                          const ReferenceOptions& opts = {});

/// Residual -div F of the semi-discrete scheme (exposed for tests).
StateArray reference_rhs(const ConservationLaw& law, const GridSpec& g, StateArray& u,
                         const ReferenceOptions& opts = {});

/// Node values on `target` from cell averages: the mean of the two (1D) or
/// four (2D) cells sharing a reference node, linearly interpolated between
/// reference nodes when target nodes do not coincide with them. Throws
/// OutOfRange if a target node lies outside the field's domain.
StateArray cell_avg_to_nodes(const CellField& field, const GridSpec& target,
                             const ConservationLaw& law);

FieldSnapshot cell_avg_to_point(const CellField& field, const GridSpec& target,
                                const EulerLaw& law, int time_index = 0);

}  // namespace nnlci

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "orbint/groups.hpp"
#include "orbint/integrands.hpp"
#include "orbint/truncation.hpp"

namespace orbint {

/// Group-side test functions reuse the integrand descriptors (bumps of
/// smoothness order 0/1/2, ramps, constants), evaluated on the chart
/// coordinates from element_chart.
using TestFunction = Integrand;

/// Right Haar data of one chain level (or the ambient group), normalized so
/// that level integrals of compactly supported functions converge to the
/// ambient integral as levels grow. Discrete factors carry a uniform atom
/// weight; continuous factors are Lebesgue in the chart.
struct HaarSpec {
  static constexpr std::string_view side{"right"};
  GroupId group;
  std::optional<std::size_t> level;  // nullopt = ambient
  bool discrete = false;             // has a discrete factor
  bool continuous_offset = false;    // has a chart-Lebesgue factor
  double atom_weight = 1.0;          // per discrete atom, includes norm_constant
  double norm_constant = 1.0;        // the chain's ambient scale

  /// Window-truncated quadrature atoms for discrete-factor levels.
  std::vector<HaarAtom> atoms(const GroupChain& chain,
                              const TruncationPolicy& trunc) const;
};

HaarSpec fell_haar(const GroupChain& chain, std::optional<std::size_t> level);

/// Integral of phi((h compose t) or (t compose h) or t), optionally with
/// the modular density, against the level (or ambient) right Haar measure.
/// Integration windows come from phi's support metadata; compact groups
/// need none.
struct HaarIntegralSpec {
  std::optional<GroupElement> translator;
  bool left = false;          // h compose t rather than t compose h
  bool modular_density = false;  // weight each t by Delta(t)
};
double haar_integral(const GroupChain& chain, std::optional<std::size_t> level,
                     const TestFunction& phi, const HaarIntegralSpec& spec,
                     const TruncationPolicy& trunc);

/// Per-level deviations |rho_n(phi) - rho(phi)| over a panel.
struct FellReport {
  std::size_t first_level = 0;
  std::vector<std::vector<double>> deviations;  // [level][panel index]
  std::vector<double> per_level_max;
  double final_max = 0.0;  // max deviation at the highest level
  double tol = 0.0;
  bool tail_nonincreasing = false;  // slack factor 2 between levels
  bool pass = false;
};
FellReport fell_convergence_report(const GroupChain& chain,
                                   std::size_t first_level,
                                   std::size_t last_level,
                                   const std::vector<TestFunction>& panel,
                                   const TruncationPolicy& trunc, double tol);

/// |int phi(th) drho_n - int phi drho_n| over translators h and a panel.
struct RightInvarianceReport {
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};
RightInvarianceReport haar_right_invariance_report(
    const GroupChain& chain, std::optional<std::size_t> level,
    const std::vector<GroupElement>& translators,
    const std::vector<TestFunction>& panel, const TruncationPolicy& trunc,
    double tol);

/// Left-invariance residuals of the modular-weighted level measure:
/// |int phi(ht) Delta(t) drho_n(t) - int phi(t) Delta(t) drho_n(t)|.
struct ModularConditionReport {
  std::vector<double> residuals;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};
ModularConditionReport modular_condition_report(
    const GroupChain& chain, std::size_t level,
    const std::vector<TestFunction>& panel, const TruncationPolicy& trunc,
    double tol);
/// Same, with explicit translators (the default samples 5 level elements).
ModularConditionReport modular_condition_report(
    const GroupChain& chain, std::size_t level,
    const std::vector<GroupElement>& translators,
    const std::vector<TestFunction>& panel, const TruncationPolicy& trunc,
    double tol);

/// Three or more test functions suited to the family's chart, for
/// invariance panels.
std::vector<TestFunction> default_test_panel(const GroupId& group);

/// Five translators inside the given level, spread across the window.
std::vector<GroupElement> default_translators(const GroupChain& chain,
                                              const GroupId& level_id,
                                              const TruncationPolicy& trunc);

}  // namespace orbint

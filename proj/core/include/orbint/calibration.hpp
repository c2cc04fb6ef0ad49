#pragma once

namespace orbint::calibration {

// Every threshold here was committed after a deterministic oracle run of
// this repository (command and observation noted per constant). Tests and
// scenarios read them from this one place.

// Oracle run: build/tests/orbint_acceptance case 2 (2026-08-16), 1000
// points, seed 1, dyadic levels k <= 14. Observed final median
// |R_{2^14} f - 4.0| = 0.232; bound committed with ~25% headroom.
inline constexpr double kJessenFinalMedianBound = 0.31;

// Oracle run: build/tests/orbint_acceptance case 3 (2026-08-16), 200
// points, seed 1, full schedule n <= 10^4. Observed running max at the last
// checkpoint above 40.0 at 95% of points (median final max 154.7, smallest
// 4.72). Multiple of the equidistribution reference 4.0 that counts as
// divergence evidence at a point:
inline constexpr double kDivergenceMultiple = 10.0;
// Fraction of sample points that must exceed it to raise the flag:
inline constexpr double kDivergenceFraction = 0.5;

// Oracle run: build/tests/orbint_acceptance case 5 at resolutions 2^14 and
// 2^16 (2026-08-16): observed max pairwise gap 2.74e-08 at 2^14, shrink
// factor ~20 per 4x resolution. Gap budget for the three-integral identity
// at resolution 2^14:
inline constexpr double kCrucialIdentityTol = 1.0e-4;

// Binomial standard error sqrt(0.3*0.7/256) for the degree-256 cylinder
// empirical mean (orbint_acceptance case 9 checks coverage against it):
inline constexpr double kCylinderStdErr256 = 0.028641;

// Oracle run: the case-7 audits of build/tests/orbint_acceptance with the
// constant forced to 1 (2026-08-16): worst ratio of alpha*mu(level set) to
// the level-set integral over the line window [-2, 3] was 2.50 for the
// indicator kernel and 4.59 for the power kernel. Committed with ~30%
// headroom; the window carries mass 5, so values of this order are
// expected for flat maxima.
inline constexpr double kLineAuditConstant = 6.0;

}  // namespace orbint::calibration

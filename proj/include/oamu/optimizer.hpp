#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "oamu/mathieu.hpp"
#include "oamu/states.hpp"

namespace oamu {

/// Target for the constrained minimum-product search: hold either the
/// dispersion or the angular-momentum variance fixed.
struct ConstraintTarget {
    enum class Kind { fixed_dispersion, fixed_var_l };
    Kind kind = Kind::fixed_dispersion;
    double value = 1.0;
};

/// Thrown when the requested constraint value is outside the attainable
/// range; the message carries the range or the scanned bracket.
struct InfeasibleTargetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MinStateResult {
    double q = 0.0;
    ModeSpectrum state;
    UncertaintyReport report;
};

/// Minimum uncertainty-product state at the given constraint: the even
/// Mathieu ground state whose q makes D^2 (or var_L) hit the target, shifted
/// to mean angular momentum mean_m. D^2(q) decreasing / var_L(q) increasing
/// is asserted from the samples gathered while bracketing the root.
MinStateResult min_state(const ConstraintTarget& target, int mean_m = 0);

/// Relabels modes m -> m + mbar. <L> grows by exactly mbar; the dispersion
/// and (dL)^2 are untouched.
ModeSpectrum shift_mean(const ModeSpectrum& state, int mbar);

/// q of the even Mathieu ground state with the given dispersion D^2.
double q_for_dispersion(double dispersion_sq_target);

/// q of the even Mathieu ground state with the given (dL)^2.
double q_for_var_l(double var_l_target);

struct AuditResult {
    double min_trial_product = 0.0;  // +inf when no trial survived
    double mathieu_product = 0.0;
    int evaluated = 0;
    int discarded = 0;
};

/// Optimality audit: random symmetrized trial states with support |m| <= 20
/// are projected onto the ground state's <cos phi> constraint (mixing with
/// the uniform state); none may beat the Mathieu product by more than
/// numerical slack. Trials whose constraint is unreachable are discarded and
/// counted.
AuditResult variational_audit(double q, int trials, std::uint64_t seed);

/// Projection used by the audit: mixes the state with the uniform mode
/// (amplitude t on c_0, 1-t on the input, renormalized) until <cos phi>
/// matches theta_target. t is searched in [t_lo, 1]; returns nothing when no
/// sign change exists in the bracket.
std::optional<ModeSpectrum> project_to_theta(const ModeSpectrum& state, double theta_target,
                                             double t_lo = 0.0);

}  // namespace oamu

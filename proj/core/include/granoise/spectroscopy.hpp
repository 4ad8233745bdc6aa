#pragma once

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Core>

namespace granoise {

/// Four-level ladder 1-2-3-4 (ground, intermediate, two Rydberg levels).
///
/// All frequencies are angular (rad/s). Rabi frequencies drive 1-2 (probe),
/// 2-3 (coupling) and 3-4 (microwave). Detunings follow the rotating-frame
/// convention H = -hbar*(dp|2><2| + (dp+dc)|3><3| + (dp+dc+ds)|4><4|) - ...,
/// so a positive detuning means the field is blue of its transition.
/// Wavenumbers are signed along the probe axis; the default configuration is
/// counter-propagating (k_p > 0, k_c < 0).
struct FourLevelParams {
    double omega_p_rabi = 0.0;
    double omega_c_rabi = 0.0;
    double omega_s_rabi = 0.0;
    double delta_p = 0.0;
    double delta_c = 0.0;
    double delta_s = 0.0;
    double gamma2 = 0.0;  // population decay 2 -> 1
    double gamma3 = 0.0;  // 3 -> 2
    double gamma4 = 0.0;  // 4 -> 3
    double k_p = 0.0;
    double k_c = 0.0;
    double mu12 = 0.0;  // C m
    double mu_s = 0.0;  // C m, microwave 3-4 dipole
    /// Extra pure dephasing per coherence, ordered (21, 31, 41, 32, 42, 43).
    std::array<double, 6> dephasing{};

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    /// Coherence decay rate gamma_ij = (G_i + G_j)/2 + dephasing_ij, levels 1-based.
    double coherence_decay(int i, int j) const;
};

/// Complex single-atom polarizability alpha = alpha_r + i alpha_i, in C m^2 / V.
struct Polarizability {
    double alpha_r = 0.0;
    double alpha_i = 0.0;

    std::complex<double> value() const { return {alpha_r, alpha_i}; }
    static Polarizability from(std::complex<double> z) { return {z.real(), z.imag()}; }
};

enum class ResponseMode { weak_probe, full };

std::string_view to_string(ResponseMode mode);
ResponseMode response_mode_from_string(std::string_view s);

class DensityMatrix4 {
  public:
    DensityMatrix4() : rho_(Eigen::Matrix4cd::Zero()) { rho_(0, 0) = 1.0; }
    explicit DensityMatrix4(const Eigen::Matrix4cd& rho) : rho_(rho) {}

    const Eigen::Matrix4cd& matrix() const { return rho_; }
    /// 1-based element access, rho_ij = <i|rho|j>.
    std::complex<double> operator()(int i, int j) const { return rho_(i - 1, j - 1); }

    std::complex<double> trace() const { return rho_.trace(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;

  private:
    Eigen::Matrix4cd rho_;
};

struct SteadyStateOptions {
    /// Reciprocal condition estimates below this are rejected.
    double min_rcond = 1e-14;
};

/// Returns params with Doppler-shifted optical detunings for an atom moving at
/// axial velocity v. The microwave detuning is left untouched.
FourLevelParams doppler_shift(const FourLevelParams& params, double velocity);

/// Weak-probe polarizability as a function of axial velocity for fixed
/// params; hoists everything velocity-independent out of the per-atom loop.
class WeakProbeKernel {
  public:
    explicit WeakProbeKernel(const FourLevelParams& params);

    /// alpha(v) in C m^2 / V.
    std::complex<double> operator()(double velocity) const;

  private:
    double g21_, g31_, g41_;
    double oc2_, os2_;
    double delta_p_, delta_c_, delta_s_;
    double k_p_, k_c_;
    double prefactor_;
};

/// Linear-response polarizability from the nested-denominator solution of
/// the ladder, valid for omega_p_rabi -> 0. The probe Rabi frequency is ignored.
Polarizability weak_probe_alpha(const FourLevelParams& params, double velocity);

/// Rotating-frame Lindblad steady state with radiative decay 2->1, 3->2, 4->3.
DensityMatrix4 steady_state(const FourLevelParams& params, double velocity,
                            const SteadyStateOptions& options = {});

/// alpha = 2 mu12^2 rho_21 / (hbar Omega_p).
///
/// rho_21 = <2|rho|1> in the frame of steady_state(); with the spectroscopic
/// phase rho~_21 = -i rho_21 this is alpha = (2 mu12^2/(hbar Omega_p)) i rho~_21.
/// In the weak-probe limit it reproduces weak_probe_alpha().
Polarizability alpha_from_coherence(const DensityMatrix4& rho, const FourLevelParams& params);

/// Dispatches on the response mode; the full mode uses the probe Rabi frequency in params.
Polarizability polarizability(const FourLevelParams& params, double velocity, ResponseMode mode,
                              const SteadyStateOptions& options = {});

}  // namespace granoise

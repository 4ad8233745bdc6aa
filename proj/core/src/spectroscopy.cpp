#include "granoise/spectroscopy.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"

namespace granoise {

namespace {

using cd = std::complex<double>;
using RealVec16 = Eigen::Matrix<double, 16, 1>;
using RealMat16 = Eigen::Matrix<double, 16, 16>;

constexpr int pair_index(int i, int j) {
    // (21, 31, 41, 32, 42, 43) with 1-based, i > j
    if (j == 1) return i - 2;
    if (j == 2) return i == 3 ? 3 : 4;
    return 5;
}

// Real parametrization of a Hermitian 4x4 matrix: populations on the
// diagonal slots, Re(rho_ij) in slot (i,j) and Im(rho_ij) in slot (j,i) for i > j.
RealVec16 to_real(const Eigen::Matrix4cd& rho) {
    RealVec16 x;
    for (int i = 0; i < 4; ++i) {
        x[4 * i + i] = rho(i, i).real();
        for (int j = 0; j < i; ++j) {
            x[4 * i + j] = rho(i, j).real();
            x[4 * j + i] = rho(i, j).imag();
        }
    }
    return x;
}

Eigen::Matrix4cd from_real(const RealVec16& x) {
    Eigen::Matrix4cd rho;
    for (int i = 0; i < 4; ++i) {
        rho(i, i) = x[4 * i + i];
        for (int j = 0; j < i; ++j) {
            const cd z{x[4 * i + j], x[4 * j + i]};
            rho(i, j) = z;
            rho(j, i) = std::conj(z);
        }
    }
    return rho;
}

// Master-equation generator in units of the scale rate.
struct Generator {
    Eigen::Matrix4cd hamiltonian;
    std::array<double, 4> decay{};           // population decay out of level k (0-based)
    Eigen::Matrix4d extra_dephasing = Eigen::Matrix4d::Zero();

    Eigen::Matrix4cd operator()(const Eigen::Matrix4cd& rho) const {
        const cd minus_i{0.0, -1.0};
        Eigen::Matrix4cd out = minus_i * (hamiltonian * rho - rho * hamiltonian);
        // Cascade k -> k-1 with jump operator sqrt(G_k)|k-1><k|.
        for (int k = 1; k < 4; ++k) {
            const double g = decay[k];
            if (g == 0.0) continue;
            out(k - 1, k - 1) += g * rho(k, k);
            for (int j = 0; j < 4; ++j) {
                out(k, j) -= 0.5 * g * rho(k, j);
                out(j, k) -= 0.5 * g * rho(j, k);
            }
        }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j) out(i, j) -= extra_dephasing(i, j) * rho(i, j);
        return out;
    }
};

Generator make_generator(const FourLevelParams& p, double scale) {
    Generator g;
    const double dp = p.delta_p / scale;
    const double dc = p.delta_c / scale;
    const double ds = p.delta_s / scale;
    g.hamiltonian = Eigen::Matrix4cd::Zero();
    g.hamiltonian(1, 1) = -dp;
    g.hamiltonian(2, 2) = -(dp + dc);
    g.hamiltonian(3, 3) = -(dp + dc + ds);
    const double wp = 0.5 * p.omega_p_rabi / scale;
    const double wc = 0.5 * p.omega_c_rabi / scale;
    const double ws = 0.5 * p.omega_s_rabi / scale;
    g.hamiltonian(1, 0) = g.hamiltonian(0, 1) = -wp;
    g.hamiltonian(2, 1) = g.hamiltonian(1, 2) = -wc;
    g.hamiltonian(3, 2) = g.hamiltonian(2, 3) = -ws;
    g.decay = {0.0, p.gamma2 / scale, p.gamma3 / scale, p.gamma4 / scale};
    for (int i = 2; i <= 4; ++i) {
        for (int j = 1; j < i; ++j) {
            const double d = p.dephasing[pair_index(i, j)] / scale;
            g.extra_dephasing(i - 1, j - 1) = d;
            g.extra_dephasing(j - 1, i - 1) = d;
        }
    }
    return g;
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw DomainError(std::string("non-finite parameter: ") + name);
}

}  // namespace

void FourLevelParams::validate() const {
    const std::pair<double, const char*> all[] = {
        {omega_p_rabi, "omega_p_rabi"}, {omega_c_rabi, "omega_c_rabi"}, {omega_s_rabi, "omega_s_rabi"},
        {delta_p, "delta_p"},           {delta_c, "delta_c"},           {delta_s, "delta_s"},
        {gamma2, "gamma2"},             {gamma3, "gamma3"},             {gamma4, "gamma4"},
        {k_p, "k_p"},                   {k_c, "k_c"},                   {mu12, "mu12"},
        {mu_s, "mu_s"}};
    for (const auto& [value, name] : all) require_finite(value, name);
    if (!(gamma2 > 0.0)) throw DomainError("gamma2 must be > 0");
    if (gamma3 < 0.0 || gamma4 < 0.0) throw DomainError("decay rates must be >= 0");
    if (omega_p_rabi < 0.0 || omega_c_rabi < 0.0 || omega_s_rabi < 0.0)
        throw DomainError("Rabi frequencies must be >= 0");
    for (double d : dephasing) {
        require_finite(d, "dephasing");
        if (d < 0.0) throw DomainError("dephasing rates must be >= 0");
    }
}

double FourLevelParams::coherence_decay(int i, int j) const {
    if (i == j || i < 1 || j < 1 || i > 4 || j > 4) throw DomainError("coherence_decay: bad level pair");
    if (i < j) std::swap(i, j);
    const double pop[5] = {0.0, 0.0, gamma2, gamma3, gamma4};
    return 0.5 * (pop[i] + pop[j]) + dephasing[pair_index(i, j)];
}

std::string_view to_string(ResponseMode mode) {
    return mode == ResponseMode::weak_probe ? "weak-probe" : "full";
}

ResponseMode response_mode_from_string(std::string_view s) {
    if (s == "weak-probe") return ResponseMode::weak_probe;
    if (s == "full") return ResponseMode::full;
    throw ConfigError("unknown response mode '" + std::string(s) + "' (expected weak-probe|full)");
}

double DensityMatrix4::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix4::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

FourLevelParams doppler_shift(const FourLevelParams& params, double velocity) {
    FourLevelParams shifted = params;
    shifted.delta_p -= params.k_p * velocity;
    shifted.delta_c -= params.k_c * velocity;
    return shifted;
}

WeakProbeKernel::WeakProbeKernel(const FourLevelParams& p)
    : g21_(p.coherence_decay(2, 1)),
      g31_(p.coherence_decay(3, 1)),
      g41_(p.coherence_decay(4, 1)),
      oc2_(0.25 * p.omega_c_rabi * p.omega_c_rabi),
      os2_(0.25 * p.omega_s_rabi * p.omega_s_rabi),
      delta_p_(p.delta_p),
      delta_c_(p.delta_c),
      delta_s_(p.delta_s),
      k_p_(p.k_p),
      k_c_(p.k_c),
      prefactor_(p.mu12 * p.mu12 / constants::hbar) {}

std::complex<double> WeakProbeKernel::operator()(double velocity) const {
    const double dp = delta_p_ - k_p_ * velocity;
    const double two_photon = dp + delta_c_ - k_c_ * velocity;
    const cd d2{g21_, -dp};
    const cd d3{g31_, -two_photon};
    const cd d4{g41_, -(two_photon + delta_s_)};

    // Each dressing term is dropped when its field is off; a vanishing inner
    // denominator pins the outer dressing term to zero.
    cd inner = d3;
    bool inner_infinite = false;
    if (os2_ > 0.0) {
        if (d4 == 0.0) {
            inner_infinite = true;
        } else {
            inner += os2_ * std::conj(d4) / std::norm(d4);
        }
    }
    cd denom = d2;
    if (oc2_ > 0.0 && !inner_infinite) {
        if (inner == 0.0) return {};
        denom += oc2_ * std::conj(inner) / std::norm(inner);
    }
    if (denom == 0.0)
        throw SingularityError("weak_probe_alpha: degenerate denominator (zero decay and detuning)");
    // i * prefactor / denom
    const double n = std::norm(denom);
    return {prefactor_ * denom.imag() / n, prefactor_ * denom.real() / n};
}

Polarizability weak_probe_alpha(const FourLevelParams& params, double velocity) {
    return Polarizability::from(WeakProbeKernel(params)(velocity));
}

DensityMatrix4 steady_state(const FourLevelParams& params, double velocity,
                            const SteadyStateOptions& options) {
    params.validate();
    if (params.omega_p_rabi == 0.0 && params.omega_c_rabi == 0.0 && params.omega_s_rabi == 0.0)
        return DensityMatrix4{};

    const FourLevelParams p = doppler_shift(params, velocity);
    const Generator gen = make_generator(p, p.gamma2);

    RealMat16 m;
    for (int col = 0; col < 16; ++col) {
        RealVec16 e = RealVec16::Zero();
        e[col] = 1.0;
        m.col(col) = to_real(gen(from_real(e)));
    }
    // Trace preservation makes the population equations linearly dependent;
    // the rho_11 row is replaced by the normalization constraint.
    m.row(0).setZero();
    for (int k = 0; k < 4; ++k) m(0, 4 * k + k) = 1.0;
    RealVec16 rhs = RealVec16::Zero();
    rhs[0] = 1.0;

    const Eigen::PartialPivLU<RealMat16> lu(m);
    // The Hager estimate can miss exact zero pivots, so the pivot ratio of U
    // bounds it from above.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
    const RealVec16 x = rcond >= options.min_rcond ? RealVec16(lu.solve(rhs)) : RealVec16::Zero();
    if (!(rcond >= options.min_rcond) || !x.allFinite()) {
        std::ostringstream msg;
        msg << "steady_state: ill-conditioned Liouvillian (condition estimate " << 1.0 / rcond << ")";
        throw SolverError(msg.str(), 1.0 / rcond);
    }
    return DensityMatrix4(from_real(x));
}

Polarizability alpha_from_coherence(const DensityMatrix4& rho, const FourLevelParams& params) {
    if (params.omega_p_rabi == 0.0)
        throw SingularityError(
            "alpha_from_coherence: omega_p_rabi = 0; use weak_probe_alpha for the linear response");
    const double prefactor = 2.0 * params.mu12 * params.mu12 / (constants::hbar * params.omega_p_rabi);
    return Polarizability::from(prefactor * rho(2, 1));
}

Polarizability polarizability(const FourLevelParams& params, double velocity, ResponseMode mode,
                              const SteadyStateOptions& options) {
    if (mode == ResponseMode::weak_probe || params.omega_p_rabi == 0.0)
        return weak_probe_alpha(params, velocity);
    return alpha_from_coherence(steady_state(params, velocity, options), params);
}

}  // namespace granoise

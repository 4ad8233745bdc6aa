#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library: the Lindblad solver vectorizes the master equation
// with Kronecker products and takes the null space by SVD.

#include <complex>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

inline constexpr double hbar = 1.054571817e-34;
inline constexpr double two_pi = 6.283185307179586476925286766559;

struct Ladder {
    double omega_p = 0, omega_c = 0, omega_s = 0;  // Rabi, rad/s
    double delta_p = 0, delta_c = 0, delta_s = 0;  // rad/s
    double gamma2 = 0, gamma3 = 0, gamma4 = 0;     // population decay, rad/s
};

/// Steady state of the rotating-frame ladder, rho(i,j) = <i+1|rho|j+1>.
inline Eigen::Matrix4cd lindblad_steady_state(const Ladder& p) {
    using M4 = Eigen::Matrix4cd;
    using M16 = Eigen::Matrix<cd, 16, 16>;
    M4 h = M4::Zero();
    h(1, 1) = -p.delta_p;
    h(2, 2) = -(p.delta_p + p.delta_c);
    h(3, 3) = -(p.delta_p + p.delta_c + p.delta_s);
    h(0, 1) = h(1, 0) = -p.omega_p / 2;
    h(1, 2) = h(2, 1) = -p.omega_c / 2;
    h(2, 3) = h(3, 2) = -p.omega_s / 2;
    const M4 id = M4::Identity();
    // Column-major vec: vec(A X B) = (B^T kron A) vec(X).
    auto kron = [](const M4& a, const M4& b) {
        M16 k;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
        return k;
    };
    M16 L = cd(0, -1) * (kron(id, h) - kron(h.transpose(), id));
    const double rates[3] = {p.gamma2, p.gamma3, p.gamma4};
    for (int k = 1; k <= 3; ++k) {
        M4 c = M4::Zero();
        c(k - 1, k) = std::sqrt(rates[k - 1]);
        const M4 cdc = c.adjoint() * c;
        L += kron(c.conjugate(), c) - 0.5 * kron(id, cdc) - 0.5 * kron(cdc.transpose(), id);
    }
    const double scale = p.gamma2;
    Eigen::JacobiSVD<M16> svd(L / scale, Eigen::ComputeFullV);
    const Eigen::Matrix<cd, 16, 1> v = svd.matrixV().col(15);
    M4 rho;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) rho(i, j) = v(4 * j + i);
    rho /= rho.trace();
    return rho;
}

/// alpha = 2 mu^2 rho_21 / (hbar Omega_p) from the oracle steady state.
inline cd alpha_from_oracle(const Ladder& p, double mu12) {
    const Eigen::Matrix4cd rho = lindblad_steady_state(p);
    return 2.0 * mu12 * mu12 * rho(1, 0) / (hbar * p.omega_p);
}

/// Resonant two-level absorption relative to its weak-probe value, 1/(1 + 2 (Omega/Gamma)^2).
inline double two_level_saturation(double omega_p, double gamma) {
    return 1.0 / (1.0 + 2.0 * (omega_p / gamma) * (omega_p / gamma));
}

}  // namespace oracle

// Built-in demonstration models.
//
// harmonic_oscillator_model: 2-state oscillator sampled at 5e-3, scalar
// noisy position observation with a half-step delay term.
// pendulums_model: two coupled inverted pendulums on carts, stabilized by
// state feedback, discretized at 5e-4; position and angle of each cart are
// observed, velocities are not.
// example1_model: the two-step degenerate model where causality and the
// output-law constraint together force the estimator to ignore a noiseless
// measurement.
#pragma once

#include <string>

#include "pkf/model.hpp"
#include "pkf/types.hpp"

namespace pkf {

inline ModelSpec harmonic_oscillator_model(Index T = 255) {
    ModelSpec m;
    m.n_x = 2;
    m.n_y = 1;
    m.T = T;
    const double dt = 5e-3;
    Mat gen(2, 2);
    gen << 0.0, 1.0, -2.0, 0.0;
    m.A_seq = {Mat::Identity(2, 2) + gen * dt};
    Mat c(1, 2);
    c << 1.0, -0.5;
    m.C_seq = {c};
    m.Q_seq = {Mat::Identity(2, 2)};
    m.R_seq = {Mat::Identity(1, 1)};
    m.P0 = 0.8 * Mat::Identity(2, 2);
    m.alpha = Vec::Ones(T + 1);
    return m;
}

inline ModelSpec pendulums_model(Index T = 1023) {
    ModelSpec m;
    m.n_x = 8;
    m.n_y = 4;
    m.T = T;
    const double dt = 5e-4;

    Mat a1(4, 4);
    a1 << 0.0, 1.0, 0.0, 0.0,
          2.9156, 0.0, -0.0005, 0.0,
          0.0, 0.0, 0.0, 1.0,
          -1.6663, 0.0, 0.0002, 0.0;
    Vec b(4);
    b << 0.0, -0.0042, 0.0, 0.0167;
    Eigen::RowVectorXd k1(4), k2(4);
    k1 << 11396.0, 7196.2, 573.96, 1199.0;
    k2 << 29241.0, 18135.0, 2875.3, 3693.9;
    Mat coupling(4, 4);
    coupling << 0.0, 0.0, 0.0, 0.0,
                0.0011, 0.0, 0.0005, 0.0,
                0.0, 0.0, 0.0, 0.0,
                -0.0003, 0.0, -0.0002, 0.0;

    Mat acl = Mat::Zero(8, 8);
    acl.block(0, 0, 4, 4) = a1 + b * k1;
    acl.block(4, 4, 4, 4) = a1 + b * k2;
    acl.block(0, 4, 4, 4) = coupling;
    acl.block(4, 0, 4, 4) = coupling;
    m.A_seq = {Mat::Identity(8, 8) + acl * dt};

    Mat cbar(2, 4);
    cbar << 1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0;
    Mat c = Mat::Zero(4, 8);
    c.block(0, 0, 2, 4) = cbar;
    c.block(2, 4, 2, 4) = cbar;
    m.C_seq = {c};

    Mat p0bar(4, 4);
    p0bar << 0.154, 0.142, -0.143, 0.093,
             0.142, 0.144, -0.124, 0.058,
             -0.143, -0.124, 0.167, -0.148,
             0.093, 0.058, -0.148, 0.192;
    p0bar *= 5e-4;
    m.P0 = Mat::Zero(8, 8);
    m.P0.block(0, 0, 4, 4) = p0bar;
    m.P0.block(4, 4, 4, 4) = p0bar;

    Mat qbar(4, 4);
    qbar << 0.642, -0.136, 0.78, 0.262,
            -0.136, 0.894, -0.248, 0.074,
            0.78, -0.248, 1.284, -0.314,
            0.262, 0.074, -0.314, 1.766;
    qbar *= 1e-2 * dt;
    Mat q = Mat::Zero(8, 8);
    q.block(0, 0, 4, 4) = qbar;
    q.block(4, 4, 4, 4) = qbar;
    m.Q_seq = {q};

    Mat rbar(2, 2);
    rbar << 0.375, -0.33,
            -0.33, 0.771;
    rbar *= 1e-2 * dt;
    Mat r = Mat::Zero(4, 4);
    r.block(0, 0, 2, 2) = rbar;
    r.block(2, 2, 2, 2) = rbar;
    r.block(0, 2, 2, 2) = rbar / 8.0;
    r.block(2, 0, 2, 2) = rbar / 8.0;
    m.R_seq = {r};

    m.alpha = Vec::Ones(T + 1);
    return m;
}

/// T = 1 with (x_0, x_1) = (q_0, q_0) and observations (y_0, y_1) = (0, x_1):
/// A = 1, Q_1 = 0, C_0 = 0, C_1 = 1, R = 0, P0 = 1, weights (0, 1).
inline ModelSpec example1_model() {
    ModelSpec m;
    m.n_x = 1;
    m.n_y = 1;
    m.T = 1;
    m.A_seq = {Mat::Identity(1, 1)};
    m.C_seq = {Mat::Zero(1, 1), Mat::Identity(1, 1)};
    m.Q_seq = {Mat::Zero(1, 1)};
    m.R_seq = {Mat::Zero(1, 1)};
    m.P0 = Mat::Identity(1, 1);
    m.alpha = Vec(2);
    m.alpha << 0.0, 1.0;
    return m;
}

inline bool is_builtin_model(const std::string& name) {
    return name == "harmonic-oscillator" || name == "pendulums" || name == "example1";
}

inline ModelSpec builtin_model(const std::string& name) {
    if (name == "harmonic-oscillator") return harmonic_oscillator_model();
    if (name == "pendulums") return pendulums_model();
    if (name == "example1") return example1_model();
    throw std::invalid_argument("unknown built-in model: " + name);
}

}  // namespace pkf

/*
 * reproj - closed-loop pose and style recovery for voxel shapes.
 *
 * Copyright 2026 The reproj Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <array>
#include <cmath>
#include <numbers>

namespace reproj {

template <typename Scalar>
using Twist = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Rotation3 = Eigen::Matrix<Scalar, 3, 3>;

/**
 * Rigid pose with five degrees of freedom: an exponential twist for rotation
 * and an in-plane translation (the out-of-plane component is always zero).
 * Translation is measured in voxels.
 */
template <typename Scalar>
struct PoseParamsT
{
    Twist<Scalar> twist = Twist<Scalar>::Zero();
    Eigen::Matrix<Scalar, 2, 1> translation = Eigen::Matrix<Scalar, 2, 1>::Zero();

    static PoseParamsT from_vector(const Eigen::Matrix<Scalar, 5, 1>& p)
    {
        PoseParamsT pose;
        pose.twist = p.template head<3>();
        pose.translation = p.template tail<2>();
        return pose;
    }

    Eigen::Matrix<Scalar, 5, 1> to_vector() const
    {
        Eigen::Matrix<Scalar, 5, 1> p;
        p << twist, translation;
        return p;
    }

    // t = [t_x t_y 0]^T
    Eigen::Matrix<Scalar, 3, 1> translation3() const
    {
        return {translation(0), translation(1), Scalar(0)};
    }
};

using PoseParams = PoseParamsT<double>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> skew(const Eigen::MatrixBase<Derived>& n)
{
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, 3, 3> m;
    m << Scalar(0), -n(2), n(1),
         n(2), Scalar(0), -n(0),
         -n(1), n(0), Scalar(0);
    return m;
}

// Below this angle the Rodrigues map switches to its second-order expansion.
inline constexpr double kRodriguesTaylorThreshold = 1e-8;
// Below this norm the Jacobian switches to its first-order expansion.
inline constexpr double kJacobianTaylorThreshold = 1e-6;

/**
 * Rodrigues map R = exp([w]x). Callers keep |w| <= pi (see wrap_to_ball);
 * larger twists still yield a valid rotation.
 */
template <typename Scalar>
Rotation3<Scalar> rotation_from_twist(const Twist<Scalar>& w)
{
    const Scalar phi = w.norm();
    const Rotation3<Scalar> W = skew(w);
    if (phi < Scalar(kRodriguesTaylorThreshold)) {
        return Rotation3<Scalar>::Identity() + W + Scalar(0.5) * W * W;
    }
    const Scalar s = std::sin(phi) / phi;
    const Scalar half = std::sin(phi / 2);
    const Scalar c = Scalar(2) * half * half / (phi * phi); // (1 - cos phi) / phi^2
    return Rotation3<Scalar>::Identity() + s * W + c * W * W;
}

/**
 * Partial derivatives of R(w) with respect to each twist coordinate:
 *
 *   dR/dw_i = ((w_i [w]x + [w x ((I - R) e_i)]x) / |w|^2) R.
 *
 * Near the identity the first-order expansion
 * [e_i]x + ([e_i]x [w]x + [w]x [e_i]x) / 2 is used instead.
 */
template <typename Scalar>
std::array<Rotation3<Scalar>, 3> rotation_jacobian(const Twist<Scalar>& w)
{
    std::array<Rotation3<Scalar>, 3> d;
    const Scalar theta2 = w.squaredNorm();
    if (std::sqrt(theta2) < Scalar(kJacobianTaylorThreshold)) {
        const Rotation3<Scalar> W = skew(w);
        for (int i = 0; i < 3; ++i) {
            const Rotation3<Scalar> E = skew(Twist<Scalar>::Unit(i));
            d[i] = E + Scalar(0.5) * (E * W + W * E);
        }
        return d;
    }
    const Rotation3<Scalar> R = rotation_from_twist(w);
    const Rotation3<Scalar> W = skew(w);
    const Rotation3<Scalar> IminusR = Rotation3<Scalar>::Identity() - R;
    for (int i = 0; i < 3; ++i) {
        const Twist<Scalar> v = w.cross(IminusR.col(i));
        d[i] = ((w(i) * W + skew(v)) / theta2) * R;
    }
    return d;
}

/**
 * Maps a twist into the closed ball of radius pi without changing the
 * rotation it represents: w -> w (1 - 2 pi / |w|) flips the axis and replaces
 * the angle phi by 2 pi - phi.
 */
template <typename Scalar>
Twist<Scalar> wrap_to_ball(Twist<Scalar> w)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    Scalar n = w.norm();
    while (n > pi) {
        w *= Scalar(1) - Scalar(2) * pi / n;
        n = w.norm();
    }
    return w;
}

/**
 * Inverse of the rigid warp [R t; 0 1] applied to a point given relative to
 * the grid center: returns R^T (x - t).
 */
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> inverse_warp(const Eigen::Matrix<Scalar, 3, 1>& x, const PoseParamsT<Scalar>& p)
{
    return rotation_from_twist(p.twist).transpose() * (x - p.translation3());
}

// Homogeneous overload; the fourth coordinate is expected to be 1.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> inverse_warp(const Eigen::Matrix<Scalar, 4, 1>& x, const PoseParamsT<Scalar>& p)
{
    return inverse_warp(Eigen::Matrix<Scalar, 3, 1>(x.template head<3>()), p);
}

/**
 * Angle of the relative rotation a^T b, in [0, pi]. Equal to
 * arccos((tr(a^T b) - 1) / 2); evaluated with atan2 of the antisymmetric
 * and symmetric parts so it stays accurate near 0 and pi.
 */
template <typename Scalar>
Scalar geodesic_distance(const Rotation3<Scalar>& a, const Rotation3<Scalar>& b)
{
    const Rotation3<Scalar> rel = a.transpose() * b;
    const Scalar cos_theta = (rel.trace() - Scalar(1)) / Scalar(2);
    const Eigen::Matrix<Scalar, 3, 1> axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
    const Scalar sin_theta = axis.norm() / Scalar(2);
    return std::atan2(sin_theta, cos_theta);
}

} // namespace reproj

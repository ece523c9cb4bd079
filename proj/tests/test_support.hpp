#pragma once

#include "reproj/projection.hpp"
#include "reproj/rotation.hpp"
#include "reproj/shape.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace reproj::testing {

inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0)
{
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(n(rng), n(rng), n(rng));
    } while (v.norm() < 1e-6);
    return v.normalized();
}

inline Eigen::Vector3d random_twist(std::mt19937_64& rng, double lo, double hi)
{
    return random_unit(rng) * uniform(rng, lo, hi);
}

inline VoxelGrid random_grid(std::mt19937_64& rng, int q)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(q) * q * q);
    for (auto& x : v) {
        x = uniform(rng);
    }
    return VoxelGrid(q, v);
}

inline VoxelGrid random_binary_grid(std::mt19937_64& rng, int q, double p_one = 0.5)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(q) * q * q);
    for (auto& x : v) {
        x = uniform(rng) < p_one ? 1.0 : 0.0;
    }
    return VoxelGrid(q, v);
}

inline Silhouette random_silhouette(std::mt19937_64& rng, int q, double lo = 0.0, double hi = 1.0)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(q) * q);
    for (auto& x : v) {
        x = uniform(rng, lo, hi);
    }
    return Silhouette(q, v);
}

inline Silhouette random_binary_silhouette(std::mt19937_64& rng, int q)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(q) * q);
    for (auto& x : v) {
        x = uniform(rng) < 0.5 ? 1.0 : 0.0;
    }
    return Silhouette(q, v);
}

// Smooth occupancy: a sum of Gaussian blobs squashed into (0,1).
inline VoxelGrid smooth_grid(std::mt19937_64& rng, int q, int blobs = 4)
{
    std::vector<Eigen::Vector3d> centers;
    std::vector<double> radii;
    for (int b = 0; b < blobs; ++b) {
        centers.emplace_back(uniform(rng, 0.3 * q, 0.7 * q), uniform(rng, 0.3 * q, 0.7 * q),
                             uniform(rng, 0.3 * q, 0.7 * q));
        radii.push_back(uniform(rng, 0.1 * q, 0.2 * q));
    }
    VoxelGrid g(q);
    for (int z = 0; z < q; ++z) {
        for (int y = 0; y < q; ++y) {
            for (int x = 0; x < q; ++x) {
                double s = 0.0;
                for (int b = 0; b < blobs; ++b) {
                    s += std::exp(-(Eigen::Vector3d(x, y, z) - centers[b]).squaredNorm() / (2 * radii[b] * radii[b]));
                }
                g(x, y, z) = std::min(1.0, s);
            }
        }
    }
    return g;
}

// Axis-aligned box [lo, hi] (inclusive, lattice coordinates) set to one.
inline void fill_box(VoxelGrid& g, Eigen::Vector3i lo, Eigen::Vector3i hi)
{
    for (int z = std::max(0, lo.z()); z <= std::min(g.q() - 1, hi.z()); ++z) {
        for (int y = std::max(0, lo.y()); y <= std::min(g.q() - 1, hi.y()); ++y) {
            for (int x = std::max(0, lo.x()); x <= std::min(g.q() - 1, hi.x()); ++x) {
                g(x, y, z) = 1.0;
            }
        }
    }
}

/**
 * Binary shape with no rotational or mirror symmetry: a central cube with a
 * neck to a wide block along +x, a thin rod along +y, and an off-axis block
 * along +z. Feature lengths are randomized by one voxel.
 */
inline VoxelGrid asymmetric_shape(std::mt19937_64& rng, int q)
{
    VoxelGrid g(q);
    const int c = q / 2;
    auto r = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    const int s = std::max(1, q / 10);
    fill_box(g, {c - s, c - s, c - s}, {c + s, c + s, c + s});
    fill_box(g, {c + s, c - s / 2, c - s / 2}, {c + 2 * s, c + s / 2, c + s / 2});
    fill_box(g, {c + 2 * s, c - 2 * s, c - s}, {c + 3 * s + r(0, 1), c + 2 * s, c + s});
    fill_box(g, {c - s / 2, c + s, c - s / 2}, {c + s / 2, c + 3 * s + r(0, 1), c + s / 2});
    fill_box(g, {c - 2 * s, c - 2 * s, c + s}, {c, c, c + 3 * s + r(0, 1)});
    return g;
}

/**
 * True if any output voxel whose sample lands near the grid changes trilinear
 * cell when a single pose coordinate moves by +-h. Finite differences across
 * such a face straddle a kink of the interpolant.
 */
inline bool pose_stencil_crosses_cell_face(int q, const PoseParams& p, double h)
{
    const double c = 0.5 * (q - 1);
    std::array<PoseParams, 10> shifted;
    for (int k = 0; k < 5; ++k) {
        for (int sgn = 0; sgn < 2; ++sgn) {
            Vector5d v = p.to_vector();
            v[k] += sgn == 0 ? h : -h;
            shifted[static_cast<std::size_t>(2 * k + sgn)] = PoseParams::from_vector(v);
        }
    }
    for (int z = 0; z < q; ++z) {
        for (int y = 0; y < q; ++y) {
            for (int x = 0; x < q; ++x) {
                const Eigen::Vector3d d(x - c, y - c, z - c);
                const Eigen::Vector3d base = inverse_warp(d, p) + Eigen::Vector3d::Constant(c);
                if ((base.array() <= -1.5).any() || (base.array() >= q + 0.5).any()) {
                    continue;
                }
                const Eigen::Vector3d cell = base.array().floor();
                for (const auto& sp : shifted) {
                    const Eigen::Vector3d moved = inverse_warp(d, sp) + Eigen::Vector3d::Constant(c);
                    if (Eigen::Vector3d(moved.array().floor()) != cell) {
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

// True if any pixel lies within a factor of two of a loss clamp bound.
inline bool near_loss_clamp(const Silhouette& m, double eps = 1e-7)
{
    for (double v : m.values()) {
        if ((v > 0.5 * eps && v < 2 * eps) || (1.0 - v > 0.5 * eps && 1.0 - v < 2 * eps)) {
            return true;
        }
    }
    return false;
}

inline PoseParams random_pose(std::mt19937_64& rng, double max_angle, double max_shift)
{
    PoseParams p;
    p.twist = random_twist(rng, 0.0, max_angle);
    p.translation = Eigen::Vector2d(uniform(rng, -max_shift, max_shift), uniform(rng, -max_shift, max_shift));
    return p;
}

inline double relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric)
{
    return (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);
}

// Basis of m components fitted on m + 4 asymmetric shapes.
inline StyleBasis test_basis(std::mt19937_64& rng, int q, int m)
{
    std::vector<VoxelGrid> shapes;
    for (int i = 0; i < m + 4; ++i) {
        shapes.push_back(asymmetric_shape(rng, q));
    }
    return fit_basis(shapes, m);
}

} // namespace reproj::testing

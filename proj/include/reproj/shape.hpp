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

#include <cstdint>
#include <span>
#include <vector>

namespace reproj {

/**
 * Cubic occupancy grid with side length q. Values lie in [0,1] and are stored
 * x-fastest: idx = x + q * (y + q * z).
 */
class VoxelGrid
{
public:
    VoxelGrid() = default;

    // All-zero grid.
    explicit VoxelGrid(int q);

    // Throws std::invalid_argument on a size mismatch or a value outside [0,1].
    VoxelGrid(int q, Eigen::VectorXd values);

    int q() const noexcept { return q_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    const Eigen::VectorXd& values() const noexcept { return values_; }

    Eigen::Index index(int x, int y, int z) const noexcept
    {
        return x + static_cast<Eigen::Index>(q_) * (y + static_cast<Eigen::Index>(q_) * z);
    }

    double operator()(int x, int y, int z) const { return values_[index(x, y, z)]; }
    double& operator()(int x, int y, int z) { return values_[index(x, y, z)]; }

    // Geometric center ((q-1)/2 along every axis); rotations pivot here.
    double center() const noexcept { return 0.5 * (q_ - 1); }

    bool is_binary() const;

    // Sum of occupancies.
    double mass() const { return values_.sum(); }

    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

private:
    int q_ = 0;
    Eigen::VectorXd values_;
};

// Style coordinates in a StyleBasis.
using StyleVector = Eigen::VectorXd;

/**
 * Fixed linear generator in logit space: an aligned shape with style s has
 * per-voxel occupancy sigmoid(mu + basis * s). Columns of basis are
 * orthonormal.
 */
struct StyleBasis
{
    int q = 0;
    Eigen::VectorXd mu;              // q^3 logits
    Eigen::MatrixXd basis;           // q^3 x m
    Eigen::VectorXd singular_values; // m, for diagnostics

    int m() const noexcept { return static_cast<int>(basis.cols()); }
};

// Occupancies are clamped to [eps, 1 - eps] before the logit.
inline constexpr double kLogitClamp = 0.01;

double sigmoid(double x) noexcept;
double clamped_logit(double v) noexcept;

/**
 * Principal directions of the clamped-logit training shapes. Each column's
 * largest-magnitude entry is positive.
 *
 * Throws std::invalid_argument if shapes is empty, the grids disagree in
 * size, or m is outside [0, min(count, q^3)].
 */
StyleBasis fit_basis(std::span<const VoxelGrid> shapes, int m);

// Aligned shape in canonical pose. Values lie strictly inside (0,1).
VoxelGrid generate(const StyleBasis& basis, const StyleVector& s);

// Projects a grid onto the basis: basis^T (logit(clamp(values)) - mu).
StyleVector encode(const StyleBasis& basis, const VoxelGrid& grid);

/**
 * Scale augmentation: every shape is resampled about the grid center at
 * every scale in (0,1] (trilinear, then binarized at 0.5). Scale is part of
 * style, not pose. Output holds shapes.size() * scales.size() grids; their
 * order is a permutation of shape-major/scale-minor order determined by
 * rng_seed.
 */
std::vector<VoxelGrid> augment_scales(std::span<const VoxelGrid> shapes, std::span<const double> scales,
                                      std::uint64_t rng_seed);

// Single isotropic rescale about the center, binarized at 0.5.
VoxelGrid rescale(const VoxelGrid& shape, double scale);

} // namespace reproj

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

#include "reproj/shape.hpp"

#include "Eigen/Core"

#include <vector>

namespace reproj {

/**
 * q x q mask with values in [0,1], stored x-fastest (idx = x + q * y).
 */
class Silhouette
{
public:
    Silhouette() = default;
    explicit Silhouette(int q);
    // Throws std::invalid_argument on a size mismatch or a value outside [0,1].
    Silhouette(int q, Eigen::VectorXd values);

    int q() const noexcept { return q_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    const Eigen::VectorXd& values() const noexcept { return values_; }

    Eigen::Index index(int x, int y) const noexcept { return x + static_cast<Eigen::Index>(q_) * y; }
    double operator()(int x, int y) const { return values_[index(x, y)]; }
    double& operator()(int x, int y) { return values_[index(x, y)]; }

    bool is_binary() const;

    friend bool operator==(const Silhouette&, const Silhouette&) = default;

private:
    int q_ = 0;
    Eigen::VectorXd values_;
};

// Hard reprojection along z: M(x,y) = max_z V(x,y,z).
Silhouette project_max(const VoxelGrid& grid);

struct MaxProjection
{
    Silhouette silhouette;
    // z receiving the subgradient per pixel; lowest z among ties, 0 on an empty ray.
    std::vector<int> argmax;
};

MaxProjection project_max_subgradient(const VoxelGrid& grid);

// Noisy-or reprojection along z: M(x,y) = 1 - prod_z (1 - V(x,y,z)).
Silhouette project_soft(const VoxelGrid& grid);

struct SoftProjection
{
    Silhouette silhouette;
    // dM(x,y)/dV(x,y,z) = prod_{z' != z} (1 - V(x,y,z')), laid out like the grid.
    Eigen::VectorXd gradient;
};

SoftProjection project_soft_with_gradient(const VoxelGrid& grid);

} // namespace reproj

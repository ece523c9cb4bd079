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
#include "reproj/projection.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace reproj {

Silhouette::Silhouette(int q) : q_(q)
{
    if (q <= 0) {
        throw std::invalid_argument("Silhouette: side length must be positive, got " + std::to_string(q));
    }
    values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q) * q);
}

Silhouette::Silhouette(int q, Eigen::VectorXd values) : q_(q), values_(std::move(values))
{
    if (q <= 0) {
        throw std::invalid_argument("Silhouette: side length must be positive, got " + std::to_string(q));
    }
    const Eigen::Index expected = static_cast<Eigen::Index>(q) * q;
    if (values_.size() != expected) {
        throw std::invalid_argument("Silhouette: expected " + std::to_string(expected) + " values, got " +
                                    std::to_string(values_.size()));
    }
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
            throw std::invalid_argument("Silhouette: value " + std::to_string(values_[i]) + " at index " +
                                        std::to_string(i) + " is outside [0,1]");
        }
    }
}

bool Silhouette::is_binary() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

MaxProjection project_max_subgradient(const VoxelGrid& grid)
{
    const int q = grid.q();
    const Eigen::Index plane = static_cast<Eigen::Index>(q) * q;
    const Eigen::VectorXd& v = grid.values();
    Eigen::VectorXd sil = v.head(plane);
    std::vector<int> arg(static_cast<std::size_t>(plane), 0);
    for (int z = 1; z < q; ++z) {
        const Eigen::Index off = plane * z;
        for (Eigen::Index j = 0; j < plane; ++j) {
            if (v[off + j] > sil[j]) {
                sil[j] = v[off + j];
                arg[static_cast<std::size_t>(j)] = z;
            }
        }
    }
    return {Silhouette(q, std::move(sil)), std::move(arg)};
}

Silhouette project_max(const VoxelGrid& grid)
{
    return project_max_subgradient(grid).silhouette;
}

Silhouette project_soft(const VoxelGrid& grid)
{
    const int q = grid.q();
    const Eigen::Index plane = static_cast<Eigen::Index>(q) * q;
    const Eigen::VectorXd& v = grid.values();
    Eigen::VectorXd transmit = Eigen::VectorXd::Ones(plane);
    for (int z = 0; z < q; ++z) {
        transmit.array() *= 1.0 - v.segment(plane * z, plane).array();
    }
    return Silhouette(q, (1.0 - transmit.array()).matrix());
}

SoftProjection project_soft_with_gradient(const VoxelGrid& grid)
{
    const int q = grid.q();
    const Eigen::Index plane = static_cast<Eigen::Index>(q) * q;
    const Eigen::VectorXd& v = grid.values();
    // Prefix products first, then multiply in suffix products walking back;
    // avoids dividing by (1 - V) when a voxel is exactly 1.
    Eigen::VectorXd grad(v.size());
    Eigen::VectorXd run = Eigen::VectorXd::Ones(plane);
    for (int z = 0; z < q; ++z) {
        grad.segment(plane * z, plane) = run;
        run.array() *= 1.0 - v.segment(plane * z, plane).array();
    }
    Silhouette sil(q, (1.0 - run.array()).matrix());
    run.setOnes();
    for (int z = q - 1; z >= 0; --z) {
        grad.segment(plane * z, plane).array() *= run.array();
        run.array() *= 1.0 - v.segment(plane * z, plane).array();
    }
    return {std::move(sil), std::move(grad)};
}

} // namespace reproj

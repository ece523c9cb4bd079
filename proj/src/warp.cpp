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
#include "reproj/warp.hpp"

#include "reproj/detail/trilinear.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace reproj {

namespace {

// Walks the output lattice and hands each voxel's centered offset
// d = x - c - t and its input sample position R^T d + c to visit.
template <typename Visit>
void for_each_sample(int q, const PoseParams& p, Visit&& visit)
{
    const Eigen::Matrix3d rt = rotation_from_twist(p.twist).transpose();
    const Eigen::Vector3d t = p.translation3();
    const double c = 0.5 * (q - 1);
    const Eigen::Vector3d center = Eigen::Vector3d::Constant(c);
    Eigen::Index i = 0;
    for (int z = 0; z < q; ++z) {
        for (int y = 0; y < q; ++y) {
            const Eigen::Vector3d row = Eigen::Vector3d(-c, y - c, z - c) - t;
            const Eigen::Vector3d row_pos = rt * row + center;
            for (int x = 0; x < q; ++x, ++i) {
                const Eigen::Vector3d d(row.x() + x, row.y(), row.z());
                const Eigen::Vector3d pos = row_pos + static_cast<double>(x) * rt.col(0);
                visit(i, d, pos);
            }
        }
    }
}

} // namespace

VoxelGrid transform_grid(const VoxelGrid& grid, const PoseParams& p)
{
    const int q = grid.q();
    const double* in = grid.values().data();
    Eigen::VectorXd out(grid.size());
    for_each_sample(q, p, [&](Eigen::Index i, const Eigen::Vector3d&, const Eigen::Vector3d& pos) {
        detail::TrilinearCell cell;
        out[i] = detail::locate(q, pos, cell) ? std::clamp(detail::interpolate(detail::gather(in, q, cell), cell), 0.0, 1.0)
                                              : 0.0;
    });
    return VoxelGrid(q, std::move(out));
}

WarpedGrid transform_grid_with_jacobian(const VoxelGrid& grid, const PoseParams& p)
{
    const int q = grid.q();
    const auto dR = rotation_jacobian(p.twist);
    const Eigen::Matrix3d rt = rotation_from_twist(p.twist).transpose();
    // d(sample)/dw_k = (dR/dw_k)^T d, so g . that = (dR/dw_k g) . d
    // d(sample)/d(t_x, t_y) = -R^T e_1, -R^T e_2
    const double* in = grid.values().data();
    Eigen::VectorXd out(grid.size());
    PoseJacobian jac = PoseJacobian::Zero(grid.size(), 5);
    for_each_sample(q, p, [&](Eigen::Index i, const Eigen::Vector3d& d, const Eigen::Vector3d& pos) {
        detail::TrilinearCell cell;
        if (!detail::locate(q, pos, cell)) {
            out[i] = 0.0;
            return;
        }
        const auto corners = detail::gather(in, q, cell);
        out[i] = std::clamp(detail::interpolate(corners, cell), 0.0, 1.0);
        const Eigen::Vector3d g = detail::interpolate_gradient(corners, cell);
        if (g.isZero(0.0)) {
            return;
        }
        jac(i, 0) = (dR[0] * g).dot(d);
        jac(i, 1) = (dR[1] * g).dot(d);
        jac(i, 2) = (dR[2] * g).dot(d);
        jac(i, 3) = -g.dot(rt.col(0));
        jac(i, 4) = -g.dot(rt.col(1));
    });
    return {VoxelGrid(q, std::move(out)), std::move(jac)};
}

Eigen::VectorXd transform_grid_adjoint(int q, const PoseParams& p, const Eigen::VectorXd& grad_output)
{
    const Eigen::Index n = static_cast<Eigen::Index>(q) * q * q;
    if (grad_output.size() != n) {
        throw std::invalid_argument("transform_grid_adjoint: expected " + std::to_string(n) + " entries, got " +
                                    std::to_string(grad_output.size()));
    }
    Eigen::VectorXd grad_in = Eigen::VectorXd::Zero(n);
    for_each_sample(q, p, [&](Eigen::Index i, const Eigen::Vector3d&, const Eigen::Vector3d& pos) {
        const double g = grad_output[i];
        detail::TrilinearCell cell;
        if (g != 0.0 && detail::locate(q, pos, cell)) {
            detail::scatter(grad_in.data(), q, cell, g);
        }
    });
    return grad_in;
}

} // namespace reproj

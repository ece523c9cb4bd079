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
#include "reproj/loss.hpp"

#include "reproj/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace reproj {

namespace {

void check_same_size(const Silhouette& m, const Silhouette& m_gt, const char* what)
{
    if (m.q() != m_gt.q()) {
        throw std::invalid_argument(std::string(what) + ": silhouette sides differ (" + std::to_string(m.q()) +
                                    " vs " + std::to_string(m_gt.q()) + ")");
    }
}

} // namespace

double reprojection_loss(const Silhouette& m, const Silhouette& m_gt)
{
    check_same_size(m, m_gt, "reprojection_loss");
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.size(); ++j) {
        const double mj = std::clamp(m.values()[j], kLossClamp, 1.0 - kLossClamp);
        const double g = m_gt.values()[j];
        sum += -g * std::log(mj) - (1.0 - g) * std::log(1.0 - mj);
    }
    return sum / static_cast<double>(m.size());
}

double clamp_floor_loss() noexcept
{
    return -std::log(1.0 - kLossClamp);
}

Eigen::VectorXd loss_gradient(const Silhouette& m, const Silhouette& m_gt)
{
    check_same_size(m, m_gt, "loss_gradient");
    const double norm = 1.0 / static_cast<double>(m.size());
    Eigen::VectorXd grad(m.size());
    for (Eigen::Index j = 0; j < m.size(); ++j) {
        const double raw = m.values()[j];
        if (raw < kLossClamp || raw > 1.0 - kLossClamp) {
            grad[j] = 0.0;
            continue;
        }
        const double g = m_gt.values()[j];
        grad[j] = norm * (-g / raw + (1.0 - g) / (1.0 - raw));
    }
    return grad;
}

Silhouette render_soft(const StyleBasis& basis, const StyleVector& s, const PoseParams& p)
{
    return project_soft(transform_grid(generate(basis, s), p));
}

LossGradient full_gradient(const StyleBasis& basis, const StyleVector& s, const PoseParams& p,
                           const Silhouette& m_gt)
{
    if (m_gt.q() != basis.q) {
        throw std::invalid_argument("full_gradient: target side " + std::to_string(m_gt.q()) +
                                    " does not match basis side " + std::to_string(basis.q));
    }
    const VoxelGrid aligned = generate(basis, s);
    const WarpedGrid posed = transform_grid_with_jacobian(aligned, p);
    const SoftProjection proj = project_soft_with_gradient(posed.grid);

    LossGradient out;
    out.loss = reprojection_loss(proj.silhouette, m_gt);
    const Eigen::VectorXd dl_dm = loss_gradient(proj.silhouette, m_gt);

    // dL/d(posed voxel): broadcast the pixel gradient down each ray.
    const Eigen::Index plane = dl_dm.size();
    Eigen::VectorXd dl_dv(proj.gradient.size());
    for (Eigen::Index z = 0; z < basis.q; ++z) {
        dl_dv.segment(plane * z, plane) = proj.gradient.segment(plane * z, plane).cwiseProduct(dl_dm);
    }

    out.grad_pose = posed.jacobian.transpose() * dl_dv;

    if (basis.m() == 0) {
        out.grad_style.resize(0);
        return out;
    }
    Eigen::VectorXd dl_daligned = transform_grid_adjoint(basis.q, p, dl_dv);
    // sigmoid' = V (1 - V)
    dl_daligned.array() *= aligned.values().array() * (1.0 - aligned.values().array());
    out.grad_style = basis.basis.transpose() * dl_daligned;
    return out;
}

} // namespace reproj

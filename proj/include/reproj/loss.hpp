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

#include "reproj/projection.hpp"
#include "reproj/rotation.hpp"
#include "reproj/shape.hpp"

#include "Eigen/Core"

namespace reproj {

// Predicted silhouette values are clamped to [eps, 1 - eps] inside the loss.
inline constexpr double kLossClamp = 1e-7;

/**
 * Binary cross-entropy between a predicted and a target silhouette, averaged
 * over the q^2 pixels.
 */
double reprojection_loss(const Silhouette& m, const Silhouette& m_gt);

// Smallest attainable loss for a binary target: -log(1 - eps).
double clamp_floor_loss() noexcept;

/**
 * dL/dm per pixel. Pixels strictly outside [eps, 1 - eps] get zero, since the
 * clamped loss is flat there.
 */
Eigen::VectorXd loss_gradient(const Silhouette& m, const Silhouette& m_gt);

struct LossGradient
{
    double loss = 0.0;
    Eigen::VectorXd grad_style; // M
    Vector5d grad_pose;         // (w1, w2, w3, tx, ty)
};

/**
 * Loss and gradient of the full pipeline generate -> transform -> soft
 * projection -> cross-entropy with respect to style and pose. The basis is
 * held fixed.
 */
LossGradient full_gradient(const StyleBasis& basis, const StyleVector& s, const PoseParams& p,
                           const Silhouette& m_gt);

// The forward half of full_gradient: the soft silhouette of the posed shape.
Silhouette render_soft(const StyleBasis& basis, const StyleVector& s, const PoseParams& p);

} // namespace reproj

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

#include "reproj/rotation.hpp"
#include "reproj/shape.hpp"

#include "Eigen/Core"

namespace reproj {

// Per-voxel derivatives of a warped grid with respect to (w1, w2, w3, tx, ty).
using PoseJacobian = Eigen::Matrix<double, Eigen::Dynamic, 5>;

struct WarpedGrid
{
    VoxelGrid grid;
    PoseJacobian jacobian; // q^3 x 5, row per output voxel
};

/**
 * Rigid transformation layer. Output voxel x reads the input at
 * R^T (x - c - t) + c by trilinear interpolation, with zeros outside the
 * grid; c is the grid center.
 */
VoxelGrid transform_grid(const VoxelGrid& grid, const PoseParams& p);

/**
 * transform_grid plus the derivative of every output voxel with respect to
 * the pose. The spatial gradient of the trilinear interpolant is exact within
 * its cell; the interpolant is not differentiable across cell faces.
 */
WarpedGrid transform_grid_with_jacobian(const VoxelGrid& grid, const PoseParams& p);

/**
 * Adjoint of transform_grid with respect to the input occupancies: scatters
 * a per-output-voxel gradient back onto the input lattice through the
 * trilinear weights.
 */
Eigen::VectorXd transform_grid_adjoint(int q, const PoseParams& p, const Eigen::VectorXd& grad_output);

} // namespace reproj

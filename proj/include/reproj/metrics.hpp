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

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace reproj {

/**
 * Average precision of per-instance scores against binary labels. Instances
 * are ranked by descending score, ties by ascending index; AP is the mean,
 * over positives, of the precision at each positive's rank.
 *
 * With no positives AP is 1 if every score is zero; otherwise it is
 * undefined and std::invalid_argument is thrown, as it is for non-binary
 * labels or a size mismatch.
 */
double average_precision(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

double voxel_ap(const VoxelGrid& pred, const VoxelGrid& gt);
double silhouette_ap(const Silhouette& pred, const Silhouette& gt);

struct RotationMetrics
{
    double acc_pi_over_6 = 0.0; // fraction of pairs with geodesic error < pi/6
    double med_err_degrees = 0.0;
};

using PosePair = std::pair<PoseParams, PoseParams>; // (predicted, ground truth)

// Throws std::invalid_argument on an empty list.
RotationMetrics rotation_metrics(std::span<const PosePair> pairs);

// Median of |pred_t - gt_t| / frame. Throws on an empty list or frame <= 0.
double translation_mederr(std::span<const std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs, double frame = 30.0);

// Median; mean of the two central values for an even count.
double median(std::vector<double> values);

struct EvalRecord
{
    std::string id;
    std::optional<VoxelGrid> pred_grid;
    std::optional<VoxelGrid> gt_grid;
    Silhouette pred_sil;
    Silhouette gt_sil;
    PoseParams pred_pose;
    std::optional<PoseParams> gt_pose;
};

/**
 * Aggregate scores. A metric with no contributing records is NaN.
 */
struct MetricsReport
{
    double ap3d = 0.0;
    double ap2d = 0.0;
    double acc_pi_over_6 = 0.0;
    double med_err_rotation = 0.0; // degrees
    double med_err_translation = 0.0; // offset / frame
    int count = 0;

    // Single tab-separated line: ap3d ap2d acc_pi_6 mederr_rot_deg mederr_trans count.
    std::string to_tsv() const;
    // Aligned two-column table for terminals.
    std::string to_table() const;
};

MetricsReport evaluate(std::span<const EvalRecord> records, double frame = 30.0);

} // namespace reproj

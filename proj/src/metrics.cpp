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
#include "reproj/metrics.hpp"

#include "reproj/detail/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace reproj {

double average_precision(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels)
{
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("average_precision: " + std::to_string(scores.size()) + " scores vs " +
                                    std::to_string(labels.size()) + " labels");
    }
    Eigen::Index positives = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0.0 && labels[i] != 1.0) {
            throw std::invalid_argument("average_precision: ground truth is not binary at index " + std::to_string(i));
        }
        positives += labels[i] == 1.0;
    }
    if (positives == 0) {
        if ((scores.array() == 0.0).all()) {
            return 1.0;
        }
        throw std::invalid_argument("average_precision: undefined with zero positives and nonzero predictions");
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

    double sum = 0.0;
    Eigen::Index hits = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (labels[order[rank]] == 1.0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
        }
    }
    return sum / static_cast<double>(positives);
}

double voxel_ap(const VoxelGrid& pred, const VoxelGrid& gt)
{
    if (pred.q() != gt.q()) {
        throw std::invalid_argument("voxel_ap: grid sides differ");
    }
    return average_precision(pred.values(), gt.values());
}

double silhouette_ap(const Silhouette& pred, const Silhouette& gt)
{
    if (pred.q() != gt.q()) {
        throw std::invalid_argument("silhouette_ap: silhouette sides differ");
    }
    return average_precision(pred.values(), gt.values());
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("median: empty input");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

RotationMetrics rotation_metrics(std::span<const PosePair> pairs)
{
    if (pairs.empty()) {
        throw std::invalid_argument("rotation_metrics: empty list");
    }
    std::vector<double> errors;
    errors.reserve(pairs.size());
    std::size_t hits = 0;
    for (const auto& [pred, gt] : pairs) {
        const double theta =
            geodesic_distance<double>(rotation_from_twist(pred.twist), rotation_from_twist(gt.twist));
        hits += theta < std::numbers::pi / 6.0;
        errors.push_back(theta);
    }
    RotationMetrics out;
    out.acc_pi_over_6 = static_cast<double>(hits) / static_cast<double>(pairs.size());
    out.med_err_degrees = median(std::move(errors)) * 180.0 / std::numbers::pi;
    return out;
}

double translation_mederr(std::span<const std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs, double frame)
{
    if (pairs.empty()) {
        throw std::invalid_argument("translation_mederr: empty list");
    }
    if (!(frame > 0.0)) {
        throw std::invalid_argument("translation_mederr: frame must be positive");
    }
    std::vector<double> ratios;
    ratios.reserve(pairs.size());
    for (const auto& [pred, gt] : pairs) {
        ratios.push_back((pred - gt).norm() / frame);
    }
    return median(std::move(ratios));
}

MetricsReport evaluate(std::span<const EvalRecord> records, double frame)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    MetricsReport rep;
    rep.count = static_cast<int>(records.size());

    double ap3 = 0.0, ap2 = 0.0;
    int n3 = 0, n2 = 0;
    std::vector<PosePair> poses;
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> shifts;
    for (const auto& r : records) {
        ap2 += silhouette_ap(r.pred_sil, r.gt_sil);
        ++n2;
        if (r.pred_grid && r.gt_grid) {
            ap3 += voxel_ap(*r.pred_grid, *r.gt_grid);
            ++n3;
        }
        if (r.gt_pose) {
            poses.emplace_back(r.pred_pose, *r.gt_pose);
            shifts.emplace_back(r.pred_pose.translation, r.gt_pose->translation);
        }
    }
    rep.ap2d = n2 > 0 ? ap2 / n2 : nan;
    rep.ap3d = n3 > 0 ? ap3 / n3 : nan;
    if (poses.empty()) {
        rep.acc_pi_over_6 = rep.med_err_rotation = rep.med_err_translation = nan;
    } else {
        const RotationMetrics rm = rotation_metrics(poses);
        rep.acc_pi_over_6 = rm.acc_pi_over_6;
        rep.med_err_rotation = rm.med_err_degrees;
        rep.med_err_translation = translation_mederr(shifts, frame);
    }
    return rep;
}

std::string MetricsReport::to_tsv() const
{
    using detail::format_double;
    return format_double(ap3d) + '\t' + format_double(ap2d) + '\t' + format_double(acc_pi_over_6) + '\t' +
           format_double(med_err_rotation) + '\t' + format_double(med_err_translation) + '\t' + std::to_string(count);
}

std::string MetricsReport::to_table() const
{
    using detail::format_fixed;
    std::ostringstream os;
    os << "metric                 value\n"
       << "---------------------  ----------\n"
       << "3D AP                  " << format_fixed(ap3d, 4) << '\n'
       << "2D AP                  " << format_fixed(ap2d, 4) << '\n'
       << "Acc pi/6               " << format_fixed(acc_pi_over_6, 4) << '\n'
       << "MedErr rotation (deg)  " << format_fixed(med_err_rotation, 2) << '\n'
       << "MedErr translation     " << format_fixed(med_err_translation, 4) << '\n'
       << "records                " << count << '\n';
    return os.str();
}

} // namespace reproj

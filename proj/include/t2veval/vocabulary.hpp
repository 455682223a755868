#pragma once

#include <span>
#include <string_view>

namespace t2veval {

/// The 400 Kinetics action classes, in canonical order.
std::span<const std::string_view> kinetics400_labels();

/// The 80 COCO detection classes.
std::span<const std::string_view> coco_classes();

/// Closed color vocabulary used for color ground truth and color matching.
std::span<const std::string_view> basic_colors();

}  // namespace t2veval

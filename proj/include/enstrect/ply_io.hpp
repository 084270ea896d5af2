#pragma once

#include <string>

#include "enstrect/mapping.hpp"

namespace enstrect {

// PLY support: ASCII and binary little-endian. x/y/z are required on read;
// nx/ny/nz, red/green/blue are picked up when present, unknown properties
// are skipped. Segmented clouds add an int32 `label`, an int32 `views`, and
// one float `score_<class>` property per class.

PointCloud read_ply(const std::string& path);
void write_ply(const PointCloud& cloud, const std::string& path, bool binary = true);

SegmentedCloud read_segmented_ply(const std::string& path);
void write_segmented_ply(const SegmentedCloud& seg, const std::string& path, bool binary = true);

}  // namespace enstrect

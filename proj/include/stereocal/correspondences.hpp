#pragma once

#include <vector>

#include "stereocal/geometry.hpp"

namespace stereocal {

/// A matched detection: q1 on the primary camera, q2 on the secondary.
struct PixelPair {
  Pixel2 q1;
  Pixel2 q2;
};

/// Point correspondences between the two cameras.
using CorrespondenceSet2D = std::vector<PixelPair>;

/// Two targets of known separation observed in one image by both cameras.
struct TargetPairObservation {
  double distance = 0.0;  ///< measured distance |A - B|, meters
  PixelPair a;
  PixelPair b;
};

/// One entry per image; the 3D supervision used by the reconstruction cost.
using CorrespondenceSet3D = std::vector<TargetPairObservation>;

}  // namespace stereocal

// PNG/JPEG decode and PNG encode. Pixels cross this boundary as {H,W,3}
// float tensors in [-1,1] (byte value v maps to v/127.5 - 1).

#pragma once

#include <string>

#include "pigment/tensor.hpp"

namespace pigment {

// Throws IngestError if the file is missing or does not decode as an
// 8-bit color raster.
Tensor<float> decode_image(const std::string& path);

// Quantizes with round((v+1)*127.5) clamped to [0,255] and writes PNG.
void encode_png(const std::string& path, const Tensor<float>& image);

}  // namespace pigment

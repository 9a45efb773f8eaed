#include "pigment/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "pigment/errors.hpp"

namespace pigment {

Tensor<float> decode_image(const std::string& path) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) throw IngestError("cannot decode image: " + path);

  const int h = bgr.rows, w = bgr.cols;
  Tensor<float> out({h, w, 3});
  for (int y = 0; y < h; ++y) {
    const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x) {
      out.at(y, x, 0) = static_cast<float>(row[x][2]) / 127.5f - 1.0f;
      out.at(y, x, 1) = static_cast<float>(row[x][1]) / 127.5f - 1.0f;
      out.at(y, x, 2) = static_cast<float>(row[x][0]) / 127.5f - 1.0f;
    }
  }
  return out;
}

void encode_png(const std::string& path, const Tensor<float>& image) {
  if (image.rank() != 3 || image.dim(2) != 3) throw ShapeError("encode_png expects {H,W,3}");
  const int h = image.dim(0), w = image.dim(1);
  cv::Mat bgr(h, w, CV_8UC3);
  for (int y = 0; y < h; ++y) {
    cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = std::round((image.at(y, x, c) + 1.0f) * 127.5f);
        row[x][2 - c] = static_cast<unsigned char>(std::min(255.0f, std::max(0.0f, v)));
      }
    }
  }
  if (!cv::imwrite(path, bgr)) throw Error("cannot write PNG: " + path);
}

}  // namespace pigment

// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "visir/errors.hpp"
#include "visir/training/training.hpp"

namespace visir::training {

namespace {

Summary summarize_column(const std::vector<double>& values) {
  Summary s;
  s.max = -std::numeric_limits<double>::infinity();
  s.min = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (double v : values) {
    s.max = std::max(s.max, v);
    s.min = std::min(s.min, v);
    if (std::isinf(v) && v > 0) {
      ++s.infinite_count;
      continue;
    }
    total += v;
    ++s.count;
  }
  s.mean = s.count ? total / static_cast<double>(s.count) : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace

Evaluation summarize(std::vector<ImageResult> images) {
  if (images.empty()) throw ContractError("evaluate: the split is empty");
  std::vector<double> mse, psnr, ssim;
  for (const ImageResult& r : images) {
    mse.push_back(r.report.mse);
    psnr.push_back(r.report.psnr);
    ssim.push_back(r.report.ssim);
  }
  Evaluation e;
  e.images = std::move(images);
  e.mse = summarize_column(mse);
  e.psnr = summarize_column(psnr);
  e.ssim = summarize_column(ssim);
  return e;
}

Evaluation evaluate(const model::VisirModel& model, std::span<const data::SRPair> pairs) {
  if (pairs.empty()) throw ContractError("evaluate: the split is empty");
  std::vector<ImageResult> images(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  const auto n = static_cast<long long>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    try {
      const Image hr = model::reconstruct(p.lr, model);
      images[static_cast<std::size_t>(i)] = {p.id, metrics::evaluate_pair(p.hr, hr)};
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return summarize(std::move(images));
}

Evaluation evaluate(const model::VisirModel& model, const data::DatasetManifest& manifest,
                    const std::filesystem::path& root, const std::string& split) {
  const auto pairs = data::load_pairs(manifest, root, split);
  return evaluate(model, pairs);
}

}  // namespace visir::training

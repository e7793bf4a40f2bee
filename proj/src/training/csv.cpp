// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "visir/errors.hpp"
#include "visir/training/training.hpp"

namespace visir::training {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string loss_curve_csv(const std::vector<LossPoint>& curve) {
  std::ostringstream os;
  os << "step,loss\n";
  for (const LossPoint& p : curve) os << p.step << ',' << format_number(p.loss) << '\n';
  return os.str();
}

std::string evaluation_csv(const Evaluation& eval) {
  std::ostringstream os;
  os << "image_id,mse,psnr,ssim\n";
  for (const ImageResult& r : eval.images)
    os << r.id << ',' << format_number(r.report.mse) << ',' << format_number(r.report.psnr) << ','
       << format_number(r.report.ssim) << '\n';
  return os.str();
}

std::string sweep_csv(const SweepGrid& grid) {
  std::ostringstream os;
  os << "hidden_layers";
  for (double f : grid.frequencies) os << ",omega0=" << format_number(f);
  os << '\n';
  for (std::size_t r = 0; r < grid.hidden_layers.size(); ++r) {
    os << grid.hidden_layers[r];
    for (std::size_t c = 0; c < grid.frequencies.size(); ++c) {
      const SweepCell& cell = grid.cell(r, c);
      os << ',' << (cell.failed ? std::string("failed") : format_number(cell.mean_psnr));
    }
    os << '\n';
  }
  return os.str();
}

std::string summary_table(const Evaluation& eval) {
  std::ostringstream os;
  os << "metric,max,mean,min\n";
  auto row = [&](const char* name, const Summary& s) {
    os << name << ',' << format_number(s.max) << ',' << format_number(s.mean) << ',' << format_number(s.min) << '\n';
  };
  row("MSE", eval.mse);
  row("PSNR", eval.psnr);
  row("SSIM", eval.ssim);
  if (eval.psnr.infinite_count)
    os << "# " << eval.psnr.infinite_count << " image(s) with infinite PSNR excluded from the PSNR mean\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace visir::training

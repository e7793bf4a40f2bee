// SPDX-License-Identifier: Apache-2.0

#include "visir/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "visir/data/io.hpp"
#include "visir/errors.hpp"
#include "visir/metrics.hpp"
#include "visir/model/checkpoint.hpp"
#include "visir/random.hpp"

namespace visir::cli {

namespace fs = std::filesystem;
using training::format_number;

namespace {

constexpr std::uint64_t kBatchStream = 0x62617463ULL;

data::DatasetManifest load_dataset_manifest(const RunConfig& config) {
  return data::load_manifest(config.paths.data / data::kManifestName);
}

// The run's model keys plus the image geometry dictated by the dataset.
model::ModelConfig model_config_for(const RunConfig& config, const data::DatasetManifest& manifest) {
  model::ModelConfig cfg = config.model;
  cfg.scale = manifest.scale;
  cfg.lr_height = manifest.lr_height;
  cfg.lr_width = manifest.lr_width;
  cfg.channels = manifest.channels;
  cfg.validate();
  return cfg;
}

training::TrainConfig train_config_for(const RunConfig& config) {
  training::TrainConfig t = config.train;
  t.seed = derive_seed(config.seed, kBatchStream);
  return t;
}

fs::path checkpoint_path(const RunConfig& config) {
  return config.paths.checkpoint.empty() ? config.paths.out / "checkpoint.vsck" : config.paths.checkpoint;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Per-pixel max |error| over channels on a fixed scale: |e| = 1 maps to 255.
Image error_heat(const Image& reference, const Image& estimate, double* max_error) {
  if (!reference.same_shape(estimate))
    throw DimensionError("hr: reference is " + std::to_string(reference.height) + "x" +
                         std::to_string(reference.width) + "x" + std::to_string(reference.channels) +
                         ", reconstruction is " + std::to_string(estimate.height) + "x" +
                         std::to_string(estimate.width) + "x" + std::to_string(estimate.channels));
  Image heat(reference.height, reference.width, 1);
  double peak = 0.0;
  for (std::size_t y = 0; y < reference.height; ++y)
    for (std::size_t x = 0; x < reference.width; ++x) {
      double e = 0.0;
      for (std::size_t c = 0; c < reference.channels; ++c)
        e = std::max(e, std::abs(reference.at(y, x, c) - estimate.at(y, x, c)));
      heat.at(y, x, 0) = e;
      peak = std::max(peak, e);
    }
  *max_error = peak;
  return heat;
}

}  // namespace

int cmd_build_data(const RunConfig& config, std::ostream& out) {
  data::DatasetConfig dc = config.data;
  dc.seed = config.seed;
  dc.validate();
  ensure_dir(config.paths.out);
  const auto manifest = data::build_dataset(dc, config.paths.out);
  out << manifest.pairs.size() << " pairs\n";
  out << "manifest: " << (config.paths.out / data::kManifestName).string() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& config, std::ostream& out) {
  const auto manifest = load_dataset_manifest(config);
  const model::ModelConfig cfg = model_config_for(config, manifest);
  const auto pairs = data::load_pairs(manifest, config.paths.data, "train");
  model::VisirModel m = model::init_parameters(cfg, config.seed);
  const training::TrainResult result = training::train(m, pairs, train_config_for(config));
  ensure_dir(config.paths.out);
  const fs::path ckpt = checkpoint_path(config);
  if (ckpt.has_parent_path()) ensure_dir(ckpt.parent_path());
  model::save_checkpoint(m, ckpt.string());
  training::write_text(config.paths.out / "loss_curve.csv", training::loss_curve_csv(result.curve));
  out << "parameters: " << m.parameter_count() << '\n';
  out << "final train loss: " << format_number(result.final_loss) << '\n';
  out << "checkpoint: " << ckpt.string() << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
  const auto manifest = load_dataset_manifest(config);
  const model::ModelConfig cfg = model_config_for(config, manifest);
  const model::VisirModel m = model::load_checkpoint(checkpoint_path(config).string(), cfg);
  const auto pairs = data::load_pairs(manifest, config.paths.data, config.split);
  const training::Evaluation e = training::evaluate(m, pairs);
  ensure_dir(config.paths.out);
  const fs::path csv = config.paths.out / ("eval_" + config.split + ".csv");
  training::write_text(csv, training::evaluation_csv(e));
  out << training::summary_table(e);
  out << "per-image metrics: " << csv.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto manifest = load_dataset_manifest(config);
  const model::ModelConfig base = model_config_for(config, manifest);
  const auto train_pairs = data::load_pairs(manifest, config.paths.data, "train");
  const auto test_pairs = data::load_pairs(manifest, config.paths.data, "test");
  const training::SweepGrid grid =
      training::sweep(base, train_pairs, test_pairs, train_config_for(config), config.sweep, config.seed);
  ensure_dir(config.paths.out);
  training::write_text(config.paths.out / "sweep.csv", training::sweep_csv(grid));
  for (const auto& cell : grid.cells)
    if (cell.failed)
      err << "cell hidden_layers=" << cell.hidden_layers << " omega0=" << format_number(cell.omega0)
          << " failed: " << cell.error << '\n';
  out << grid.succeeded() << "/" << grid.cells.size() << " cells succeeded\n";
  const auto best = grid.best();
  if (!best) {
    err << "every sweep cell failed\n";
    return kExitDivergence;
  }
  out << "best: hidden_layers=" << best->hidden_layers << " omega0=" << format_number(best->omega0)
      << " mean_psnr=" << format_number(best->mean_psnr) << " dB\n";
  return kExitOk;
}

int cmd_reconstruct(const RunConfig& config, std::ostream& out) {
  if (config.paths.input.empty()) throw ConfigError("input: reconstruct needs --input");
  const model::VisirModel m = model::load_checkpoint(checkpoint_path(config).string());
  const Image lr = data::read_image(config.paths.input.string());
  const Image hr = model::reconstruct(lr, m);
  ensure_dir(config.paths.out);
  const fs::path rec = config.paths.out / "reconstruction.png";
  data::write_png(rec.string(), hr);
  out << "reconstruction: " << rec.string() << " (" << hr.height << "x" << hr.width << ")\n";
  if (config.paths.hr.empty()) return kExitOk;

  const Image reference = data::read_image(config.paths.hr.string());
  double max_error = 0.0;
  const Image heat = error_heat(reference, hr, &max_error);
  const metrics::MetricsReport r = metrics::evaluate_pair(reference, hr);
  const fs::path err_path = config.paths.out / "error.png";
  data::write_png(err_path.string(), heat);
  out << "error map: " << err_path.string() << " (|error| x 255)\n";
  out << "max abs error " << format_number(max_error) << '\n';
  out << "MSE " << format_number(r.mse) << "\nPSNR " << format_number(r.psnr) << "\nSSIM " << format_number(r.ssim)
      << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Super-resolution with a transformer encoder and a sine-activated decoder"};
  app.require_subcommand(1);
  std::string config_file;
  std::map<std::string, std::string> flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"build-data", "synthesize sources, tile, downsample, write pairs + manifest"},
      {"train", "train a model on the train split; writes checkpoint and loss curve"},
      {"eval", "evaluate a checkpoint on a split; writes per-image CSV"},
      {"sweep", "grid over omega0 x decoder hidden layers; writes sweep.csv"},
      {"reconstruct", "super-resolve one LR image; error map when --hr is given"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_file, "key = value config file with [model] [train] [data] [sweep] [run]");
    for (const KeySpec& k : key_specs()) {
      const RunConfig defaults;
      sub->add_option("--" + k.name, flags[k.name], k.help + " [" + k.section + "] (default " + k.get(defaults) + ")");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    RunConfig config;
    const fs::path cwd = fs::current_path();
    config.paths.data = cwd / config.paths.data;
    config.paths.out = cwd / config.paths.out;
    if (!config_file.empty()) apply_assignments(config, parse_config_file(config_file));
    Assignments overrides;
    for (const KeySpec& k : key_specs())
      if (sub->get_option("--" + k.name)->count() > 0) overrides[k.name] = {flags[k.name], cwd};
    apply_assignments(config, overrides);

    if (name == "build-data") return cmd_build_data(config, out);
    if (name == "train") return cmd_train(config, out);
    if (name == "eval") return cmd_eval(config, out);
    if (name == "sweep") return cmd_sweep(config, out, err);
    return cmd_reconstruct(config, out);
  } catch (const ConfigMismatchError& e) {
    err << "checkpoint mismatch: " << e.what() << '\n';
    return kExitCheckpointMismatch;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const NonFiniteError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::logic_error& e) {
    // ContractError, DimensionError, TilingError: the configuration asked for something invalid.
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace visir::cli

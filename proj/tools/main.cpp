// mipseg command-line tool: synthesize phantoms, project, carve, train and
// evaluate from one binary. Every subcommand is a thin wrapper over the
// library; exit codes are 0 success, 2 usage, 3 data, 4 numeric failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "mipseg/agree.hpp"
#include "mipseg/annotate.hpp"
#include "mipseg/carve.hpp"
#include "mipseg/loss.hpp"
#include "mipseg/net.hpp"
#include "mipseg/parallel.hpp"
#include "mipseg/phantom.hpp"
#include "mipseg/project.hpp"
#include "mipseg/score.hpp"
#include "mipseg/train.hpp"
#include "mipseg/volume_io.hpp"

namespace fs = std::filesystem;
using namespace mipseg;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Axis> parse_axes(const std::string& s) {
  if (s.empty()) throw UsageError("empty axis list");
  std::vector<Axis> axes;
  std::set<char> seen;
  for (char c : s) {
    if (c < '0' || c > '2') throw UsageError("axis must be 0, 1 or 2");
    if (!seen.insert(c).second) throw UsageError("duplicate axis");
    axes.push_back(Axis(c - '0'));
  }
  return axes;
}

Supervision parse_supervision(const std::string& spec) {
  Supervision sv;
  if (spec == "3d") {
    sv.mode = Supervision::Mode::kFull3d;
    return sv;
  }
  if (spec.rfind("mip:", 0) == 0) {
    sv.mode = Supervision::Mode::kMip;
    sv.axes = parse_axes(spec.substr(4));
    return sv;
  }
  if (spec.rfind("slices:", 0) == 0) {
    std::string rest = spec.substr(7);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw UsageError("slices spec must be slices:<axis>:<count>");
    std::string ax = rest.substr(0, colon), cnt = rest.substr(colon + 1);
    if (ax.size() != 1 || ax[0] < '0' || ax[0] > '2')
      throw UsageError("slice axis must be 0, 1 or 2");
    sv.mode = Supervision::Mode::kSlices;
    sv.slice_axis = Axis(ax[0] - '0');
    try {
      std::size_t used = 0;
      sv.slice_count = std::stoi(cnt, &used);
      if (used != cnt.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("bad slice count '" + cnt + "'");
    }
    if (sv.slice_count < 1) throw UsageError("slice count must be >= 1");
    return sv;
  }
  throw UsageError("unknown supervision spec '" + spec + "'");
}

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    auto last = line.find_last_not_of(" \t\r");
    line.erase(last == std::string::npos ? 0 : last + 1);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(lineno) + " is not key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

MipAnnotationSet load_mip_files(const std::vector<std::string>& files) {
  std::vector<LabelImage> entries;
  for (const auto& f : files) entries.push_back(read_label_image(f));
  return make_mip_set(std::move(entries));
}

BinaryImage fg_mask(const LabelImage& img) {
  BinaryImage out(img.axis, img.dims);
  std::transform(img.data.begin(), img.data.end(), out.data.begin(),
                 [](std::uint8_t l) { return l == kForeground ? 1 : 0; });
  return out;
}

void write_curve_csv(const ConsistencyCurve& c, const fs::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "d,fraction\n";
  for (std::size_t p = 0; p < c.distances.size(); ++p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.9g\n", c.distances[p], c.fraction[p]);
    f << buf;
  }
}

// ---------------------------------------------------------------------------

int cmd_mip(const std::string& in, const std::string& axis_arg,
            const std::string& out_prefix, bool preview) {
  ScalarVolume vol = read_scalar_volume(in);
  std::vector<Axis> axes = axis_arg == "all"
                               ? std::vector<Axis>{Axis::x, Axis::y, Axis::z}
                               : parse_axes(axis_arg);
  for (const auto& res : mip_set(vol, axes)) {
    std::string stem = out_prefix + "_a" + std::to_string(axis_index(res.image.axis));
    write_image(res.image, stem + ".vsg");
    if (preview) write_pgm_preview(res.image, stem + ".pgm");
  }
  return 0;
}

int cmd_hull(const std::vector<std::string>& mip_files, const std::string& out) {
  Hull h = build_hull(load_mip_files(mip_files));
  write_volume(to_label_volume(h), out);
  return 0;
}

int cmd_filter(const std::vector<std::string>& mip_files,
               const std::string& out_prefix) {
  if (mip_files.size() == 1) {
    // Single projection: nothing to intersect, pass the annotation through.
    LabelImage img = read_label_image(mip_files[0]);
    write_image(img, out_prefix + "_a" + std::to_string(axis_index(img.axis)) + ".vsg");
    return 0;
  }
  MipAnnotationSet filtered = filter_labels(load_mip_files(mip_files));
  for (const auto& e : filtered.entries)
    write_image(e, out_prefix + "_a" + std::to_string(axis_index(e.axis)) + ".vsg");
  return 0;
}

int cmd_rasterize(const std::string& swc, const std::vector<int>& dims, int width,
                  const std::string& out) {
  CenterlineSet lines = read_swc(swc);
  write_volume(rasterize(lines, {dims[0], dims[1], dims[2]}, width), out);
  return 0;
}

int cmd_synth(const std::string& config, const std::string& out_prefix, int width,
              bool labels, const std::string& mips_axes) {
  auto kv = read_config(config);
  static const std::set<std::string> known = {
      "d0", "d1", "d2", "tubes", "radius_min", "radius_max",
      "intensity", "noise_sigma", "clutter", "seed"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw IoError("unknown config key '" + k + "'");
  auto geti = [&](const char* k, int dflt) {
    return kv.count(k) ? std::stoi(kv.at(k)) : dflt;
  };
  auto getd = [&](const char* k, double dflt) {
    return kv.count(k) ? std::stod(kv.at(k)) : dflt;
  };
  PhantomConfig cfg;
  cfg.dims = {geti("d0", 32), geti("d1", 64), geti("d2", 64)};
  cfg.tube_count = geti("tubes", 3);
  cfg.radius_min = getd("radius_min", 1.5);
  cfg.radius_max = getd("radius_max", 2.5);
  cfg.intensity = getd("intensity", 0.9);
  cfg.noise_sigma = getd("noise_sigma", 0.05);
  cfg.clutter_blob_count = geti("clutter", 0);
  cfg.rng_seed = kv.count("seed") ? std::stoull(kv.at("seed")) : 0;

  Phantom ph = generate(cfg);
  write_volume(ph.image, out_prefix + "_img.vsg");
  write_swc(ph.centerlines, out_prefix + "_centerlines.swc");
  LabelVolume lab;
  if (labels || !mips_axes.empty())
    lab = rasterize(ph.centerlines, cfg.dims, width);
  if (labels) write_volume(lab, out_prefix + "_lab.vsg");
  if (!mips_axes.empty()) {
    MipAnnotationSet mips = mips_from_3d_labels(lab, parse_axes(mips_axes), width);
    for (const auto& e : mips.entries)
      write_image(e, out_prefix + "_mip" + std::to_string(axis_index(e.axis)) + ".vsg");
  }
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& supervision,
              int iters, std::uint64_t seed, const std::string& out,
              const std::string& trace_path, double lr,
              const std::vector<int>& crop, int base_channels) {
  Supervision sv = parse_supervision(supervision);

  if (!fs::is_directory(data_dir)) throw IoError("not a directory: " + data_dir);
  std::vector<fs::path> img_files;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    std::string name = entry.path().filename().string();
    if (name.size() > 8 && name.substr(name.size() - 8) == "_img.vsg")
      img_files.push_back(entry.path());
  }
  std::sort(img_files.begin(), img_files.end());
  if (img_files.empty()) throw IoError("no *_img.vsg volumes in " + data_dir);

  std::vector<TrainSample> dataset;
  for (const auto& img : img_files) {
    std::string prefix = img.string();
    prefix.erase(prefix.size() - 8);
    TrainSample s;
    s.image = read_scalar_volume(img);
    if (fs::exists(prefix + "_lab.vsg"))
      s.labels = read_label_volume(prefix + "_lab.vsg");
    std::vector<LabelImage> entries;
    for (int a = 0; a < 3; ++a) {
      fs::path mp = prefix + "_mip" + std::to_string(a) + ".vsg";
      if (fs::exists(mp)) entries.push_back(read_label_image(mp));
    }
    if (!entries.empty()) s.mips = make_mip_set(s.image.dims, std::move(entries));
    dataset.push_back(std::move(s));
  }

  TrainConfig tc;
  tc.supervision = sv;
  tc.iterations = iters;
  tc.rng_seed = seed;
  tc.learning_rate = lr;
  tc.crop_size = {crop[0], crop[1], crop[2]};
  NetConfig cfg;
  cfg.base_channels = base_channels;

  TrainResult res = train(dataset, tc, cfg);
  save_net(out, cfg, res.state);
  if (!trace_path.empty()) {
    std::ofstream f(trace_path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + trace_path);
    f << "iter,loss\n";
    for (std::size_t it = 0; it < res.trace.size(); ++it) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu,%.9g\n", it, res.trace[it]);
      f << buf;
    }
  }
  return 0;
}

int cmd_eval(const std::string& net_path, const std::string& in,
             const std::string& labels_path, const std::string& out,
             int thresholds) {
  auto [cfg, state] = load_net(net_path);
  ScalarVolume pred = net_forward(state, cfg, read_scalar_volume(in));
  LabelVolume labels = read_label_volume(labels_path);
  F1Sweep sweep = max_f1(pred, labels, thresholds);
  if (!out.empty()) {
    std::ofstream f(out, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + out);
    f << "threshold,precision,recall,f1\n";
    for (const auto& pt : sweep.curve) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", pt.threshold,
                    pt.precision, pt.recall, pt.f1);
      f << buf;
    }
  }
  std::printf("best_f1=%.9g\n", sweep.best.f1);
  std::printf("best_threshold=%.9g\n", sweep.best.threshold);
  return 0;
}

int cmd_consistency(const std::vector<std::string>& mip_files, int dmax,
                    const std::string& out,
                    const std::vector<std::string>& match_files,
                    const std::vector<std::string>& pr_files) {
  if (!pr_files.empty()) {
    auto [p, r] = pr_2d_vs_3d(fg_mask(read_label_image(pr_files[0])),
                              fg_mask(read_label_image(pr_files[1])));
    std::printf("precision=%.9g\n", p);
    std::printf("recall=%.9g\n", r);
    return 0;
  }
  if (!match_files.empty()) {
    if (out.empty()) throw UsageError("--match needs --out");
    ConsistencyCurve c =
        distance_match_curve(fg_mask(read_label_image(match_files[0])),
                             fg_mask(read_label_image(match_files[1])), dmax);
    write_curve_csv(c, out);
    return 0;
  }
  if (mip_files.size() < 2) throw UsageError("need at least 2 MIP annotations");
  if (out.empty()) throw UsageError("--mips needs --out");
  ConsistencyCurve c = cross_view_inconsistency(load_mip_files(mip_files), dmax);
  write_curve_csv(c, out);
  return 0;
}

int cmd_loss(const std::string& pred_path, const std::string& labels_path,
             const std::vector<std::string>& mip_files,
             const std::string& slices_spec, const std::string& norm) {
  if (norm != "sum" && norm != "mean") throw UsageError("norm must be sum or mean");
  Normalization n =
      norm == "sum" ? Normalization::kSum : Normalization::kMeanOverLabeled;
  ScalarVolume pred = read_scalar_volume(pred_path);
  LossResult res;
  if (!mip_files.empty()) {
    std::vector<LabelImage> entries;
    for (const auto& f : mip_files) entries.push_back(read_label_image(f));
    res = loss_mip(pred, make_mip_set(pred.dims, std::move(entries)), n);
  } else if (!slices_spec.empty()) {
    if (labels_path.empty()) throw UsageError("slices loss needs --labels");
    if (slices_spec.size() < 3 || slices_spec[1] != ':' || slices_spec[0] < '0' ||
        slices_spec[0] > '2')
      throw UsageError("slices spec must be <axis>:<i,j,...>");
    Axis ax = Axis(slices_spec[0] - '0');
    std::vector<int> idx;
    std::string rest = slices_spec.substr(2);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      try {
        idx.push_back(std::stoi(rest.substr(pos, comma - pos)));
      } catch (const std::exception&) {
        throw UsageError("bad slice index list");
      }
      pos = comma + 1;
    }
    res = loss_slices(pred, read_label_volume(labels_path), ax, idx, n);
  } else if (!labels_path.empty()) {
    res = loss3d(pred, read_label_volume(labels_path), n);
  } else {
    throw UsageError("need --labels, --mips or --slices");
  }
  std::fputs(format_loss_report(res.report).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly-supervised 3D curvilinear segmentation toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for conv kernels");

  auto* mip_cmd = app.add_subcommand("mip", "maximum intensity projections");
  std::string mip_in, mip_axis = "all", mip_out;
  bool mip_preview = false;
  mip_cmd->add_option("--in", mip_in, "input scalar volume")->required();
  mip_cmd->add_option("--axis", mip_axis, "0|1|2|all");
  mip_cmd->add_option("--out", mip_out, "output prefix")->required();
  mip_cmd->add_flag("--preview", mip_preview, "also write 8-bit PGM previews");

  auto* hull_cmd = app.add_subcommand("hull", "visual hull from MIP annotations");
  std::vector<std::string> hull_mips;
  std::string hull_out;
  hull_cmd->add_option("--mips", hull_mips, "2-3 annotation images")
      ->required()
      ->expected(2, 3);
  hull_cmd->add_option("--out", hull_out, "output hull volume")->required();

  auto* filter_cmd = app.add_subcommand("filter", "hull-filter MIP annotations");
  std::vector<std::string> filter_mips;
  std::string filter_out;
  filter_cmd->add_option("--mips", filter_mips, "1-3 annotation images")
      ->required()
      ->expected(1, 3);
  filter_cmd->add_option("--out-prefix", filter_out, "output prefix")->required();

  auto* rast_cmd = app.add_subcommand("rasterize", "SWC centerlines to labels");
  std::string rast_swc, rast_out;
  std::vector<int> rast_dims;
  int rast_width = 11;
  rast_cmd->add_option("--swc", rast_swc, "SWC centerline file")->required();
  rast_cmd->add_option("--dims", rast_dims, "volume dims")->required()->expected(3);
  rast_cmd->add_option("--width", rast_width, "odd ignore-margin pixel width");
  rast_cmd->add_option("--out", rast_out, "output label volume")->required();

  auto* synth_cmd = app.add_subcommand("synth", "generate a tubular phantom");
  std::string synth_cfg, synth_out, synth_mips;
  int synth_width = 7;
  bool synth_labels = false;
  synth_cmd->add_option("--config", synth_cfg, "key=value config file")->required();
  synth_cmd->add_option("--out-prefix", synth_out, "output prefix")->required();
  synth_cmd->add_option("--width", synth_width, "margin width for labels/mips");
  synth_cmd->add_flag("--labels", synth_labels, "write rasterized 3D labels");
  synth_cmd->add_option("--mips", synth_mips, "axes for MIP annotations, e.g. 012");

  auto* train_cmd = app.add_subcommand("train", "train the segmentation net");
  std::string train_data, train_sv, train_out, train_trace;
  int train_iters = 2000, train_base = 8;
  std::uint64_t train_seed = 0;
  double train_lr = 1e-5;
  std::vector<int> train_crop = {16, 32, 32};
  train_cmd->add_option("--data", train_data, "directory of *_img.vsg samples")
      ->required();
  train_cmd
      ->add_option("--supervision", train_sv, "3d | mip:<axes> | slices:<axis>:<n>")
      ->required();
  train_cmd->add_option("--iters", train_iters, "training iterations");
  train_cmd->add_option("--seed", train_seed, "RNG seed");
  train_cmd->add_option("--out", train_out, "output NET1 file")->required();
  train_cmd->add_option("--trace", train_trace, "per-iteration loss CSV");
  train_cmd->add_option("--lr", train_lr, "ADAM step size");
  train_cmd->add_option("--crop", train_crop, "crop size")->expected(3);
  train_cmd->add_option("--base-channels", train_base, "first-level channels");

  auto* eval_cmd = app.add_subcommand("eval", "max-F1 of a net on a volume");
  std::string eval_net, eval_in, eval_labels, eval_out;
  int eval_thresholds = 255;
  eval_cmd->add_option("--net", eval_net, "NET1 file")->required();
  eval_cmd->add_option("--in", eval_in, "input scalar volume")->required();
  eval_cmd->add_option("--labels", eval_labels, "ternary ground truth")->required();
  eval_cmd->add_option("--out", eval_out, "PR curve CSV");
  eval_cmd->add_option("--thresholds", eval_thresholds, "grid size");

  auto* cons_cmd = app.add_subcommand("consistency", "annotation consistency");
  std::vector<std::string> cons_mips, cons_match, cons_pr;
  std::string cons_out;
  int cons_dmax = 10;
  cons_cmd->add_option("--mips", cons_mips, "2-3 annotation images")->expected(2, 3);
  cons_cmd->add_option("--match", cons_match, "two annotation images")->expected(2);
  cons_cmd->add_option("--pr", cons_pr, "ann2d and projected-3d images")->expected(2);
  cons_cmd->add_option("--dmax", cons_dmax, "maximum dilation distance");
  cons_cmd->add_option("--out", cons_out, "curve CSV");

  auto* loss_cmd = app.add_subcommand("loss", "evaluate a training loss");
  std::string loss_pred, loss_labels, loss_slices_spec, loss_norm = "mean";
  std::vector<std::string> loss_mips;
  loss_cmd->add_option("--pred", loss_pred, "prediction volume")->required();
  loss_cmd->add_option("--labels", loss_labels, "3D label volume");
  loss_cmd->add_option("--mips", loss_mips, "annotation images")->expected(1, 3);
  loss_cmd->add_option("--slices", loss_slices_spec, "<axis>:<i,j,...>");
  loss_cmd->add_option("--norm", loss_norm, "sum | mean");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "error: 2: %s\n", e.what());
    return 2;
  }

  try {
    set_thread_count(threads);
    if (*mip_cmd) return cmd_mip(mip_in, mip_axis, mip_out, mip_preview);
    if (*hull_cmd) return cmd_hull(hull_mips, hull_out);
    if (*filter_cmd) return cmd_filter(filter_mips, filter_out);
    if (*rast_cmd) return cmd_rasterize(rast_swc, rast_dims, rast_width, rast_out);
    if (*synth_cmd)
      return cmd_synth(synth_cfg, synth_out, synth_width, synth_labels, synth_mips);
    if (*train_cmd)
      return cmd_train(train_data, train_sv, train_iters, train_seed, train_out,
                       train_trace, train_lr, train_crop, train_base);
    if (*eval_cmd)
      return cmd_eval(eval_net, eval_in, eval_labels, eval_out, eval_thresholds);
    if (*cons_cmd)
      return cmd_consistency(cons_mips, cons_dmax, cons_out, cons_match, cons_pr);
    if (*loss_cmd)
      return cmd_loss(loss_pred, loss_labels, loss_mips, loss_slices_spec, loss_norm);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: 2: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: 4: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: 3: %s\n", e.what());
    return 3;
  }
  return 0;
}

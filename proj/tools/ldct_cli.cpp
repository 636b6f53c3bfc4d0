// Command-line front end: windowing, phantom generation, training, transfer,
// inference and evaluation, driven by a JSON config with flag overrides.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ldct/ctio.hpp"
#include "ldct/dicom.hpp"
#include "ldct/errors.hpp"
#include "ldct/metrics.hpp"
#include "ldct/model.hpp"
#include "ldct/png.hpp"
#include "ldct/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// ---------------------------------------------------------------------------
// Config handling

void validate_keys(const json& j, const std::map<std::string, std::set<std::string>>& sections) {
    if (!j.is_object()) throw ldct::ConfigError("config: top level must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        auto it = sections.find(key);
        if (it == sections.end()) throw ldct::ConfigError("config: unknown key '" + key + "'");
        if (it->second.empty()) continue; // free-form section
        if (!value.is_object()) throw ldct::ConfigError("config: section '" + key + "' must be an object");
        for (const auto& [k2, v2] : value.items())
            if (!it->second.count(k2))
                throw ldct::ConfigError("config: unknown key '" + key + "." + k2 + "'");
    }
}

const std::map<std::string, std::set<std::string>> kConfigSchema = {
    {"output_dir", {}},
    {"window", {"level", "width", "y_min", "y_max", "mode"}},
    {"model",
     {"generator_base_channels", "input_slices", "discriminator", "discriminator_base_channels",
      "spec_hash"}},
    {"train",
     {"epochs", "batch_size", "learning_rate", "lr_decay_start_epoch", "lambda_adv", "lambda_cyc",
      "lambda_perc", "perceptual_taps", "perceptual_weights", "perceptual_extractor", "seed",
      "patch_size", "checkpoint_every", "image_pool_size", "gan_loss", "perceptual_on_translation",
      "adam_beta1", "adam_beta2"}},
    {"phantom",
     {"size_px", "disc_contrast_pct", "disc_diameter_px", "noise_sigma_hu", "photon_scale", "seed",
      "count"}},
    {"data", {"ldct_dir", "ndct_dir", "slab_mode", "val_ldct_dir", "val_ndct_dir"}},
    {"metrics", {"max_value", "roi_signal", "roi_background", "space"}},
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ldct::ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ldct::ConfigError(std::string("config: parse error: ") + e.what());
    }
    validate_keys(j, kConfigSchema);
    return j;
}

std::string resolve_output_dir(std::string dir) {
    if (dir.empty()) dir = ".";
    const char* root = std::getenv("LDCT_OUTPUT_ROOT");
    if (root && *root && !fs::path(dir).is_absolute()) return (fs::path(root) / dir).string();
    return dir;
}

void write_resolved_config(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "resolved_config.json");
    out << cfg.dump(2) << "\n";
}

json window_as_json(const ldct::ctio::WindowSpec& w) {
    return json{{"level", w.level_c},
                {"width", w.width_w},
                {"y_min", w.y_min},
                {"y_max", w.y_max},
                {"mode", w.divisor_mode == ldct::ctio::DivisorMode::paper_w_plus_1
                             ? "paper_w_plus_1"
                             : "dicom_w_minus_1"}};
}

ldct::ctio::WindowSpec window_from_config(const json& cfg) {
    const json w = cfg.value("window", json::object());
    const std::string mode = w.value("mode", std::string("paper_w_plus_1"));
    ldct::ctio::DivisorMode dm;
    if (mode == "paper_w_plus_1") dm = ldct::ctio::DivisorMode::paper_w_plus_1;
    else if (mode == "dicom_w_minus_1") dm = ldct::ctio::DivisorMode::dicom_w_minus_1;
    else throw ldct::ConfigError("config: window.mode must be paper_w_plus_1 or dicom_w_minus_1");
    return ldct::ctio::WindowSpec(w.value("level", 40.0), w.value("width", 300.0),
                                  w.value("y_min", 0.0), w.value("y_max", 255.0), dm);
}

ldct::model::GeneratorSpec generator_from_config(const json& cfg) {
    const json m = cfg.value("model", json::object());
    return ldct::model::GeneratorSpec::standard(m.value("generator_base_channels", 64),
                                                m.value("input_slices", 1));
}

ldct::model::DiscriminatorSpec discriminator_from_config(const json& cfg) {
    const json m = cfg.value("model", json::object());
    const std::string kind = m.value("discriminator", std::string("standard"));
    if (kind == "standard") return ldct::model::DiscriminatorSpec::standard();
    if (kind == "compact")
        return ldct::model::DiscriminatorSpec::compact(m.value("discriminator_base_channels", 16));
    throw ldct::ConfigError("config: model.discriminator must be standard or compact");
}

ldct::train::TrainConfig train_config_from(const json& cfg) {
    ldct::train::TrainConfig tc;
    if (cfg.contains("train")) tc = cfg.at("train").get<ldct::train::TrainConfig>();
    return tc;
}

ldct::ctio::PhantomSpec phantom_spec_from(const json& cfg) {
    const json p = cfg.value("phantom", json::object());
    ldct::ctio::PhantomSpec s;
    s.size_px = p.value("size_px", s.size_px);
    s.disc_contrast_pct = p.value("disc_contrast_pct", s.disc_contrast_pct);
    s.disc_diameter_px = p.value("disc_diameter_px", s.disc_diameter_px);
    s.noise_sigma_hu = p.value("noise_sigma_hu", s.noise_sigma_hu);
    s.photon_scale = p.value("photon_scale", s.photon_scale);
    s.seed = p.value("seed", s.seed);
    return s;
}

std::optional<ldct::metrics::ROISpec> roi_from(const json& m, const std::string& key) {
    if (!m.contains(key)) return std::nullopt;
    const json r = m.at(key);
    ldct::metrics::ROISpec roi;
    roi.center_row = r.value("row", 0);
    roi.center_col = r.value("col", 0);
    roi.radius_px = r.value("radius", 1);
    roi.label = r.value("label", key);
    return roi;
}

// "row,col,radius" flag form.
json roi_json_from_flag(const std::string& flag) {
    int row = 0, col = 0, radius = 0;
    if (std::sscanf(flag.c_str(), "%d,%d,%d", &row, &col, &radius) != 3)
        throw ldct::ConfigError("ROI flag must be row,col,radius: " + flag);
    return json{{"row", row}, {"col", col}, {"radius", radius}};
}

// ---------------------------------------------------------------------------
// Data helpers

std::vector<fs::path> sorted_files(const std::string& dir, const std::string& ext) {
    if (!fs::is_directory(dir)) throw ldct::DataError("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && (ext.empty() || entry.path().extension() == ext))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

ldct::ctio::DomainDataset load_slice_dir(const std::string& dir, ldct::ctio::DomainTag tag,
                                         std::uint64_t seed) {
    std::vector<ldct::ctio::CTSlice> slices;
    int index = 0;
    for (const auto& path : sorted_files(dir, ".tns")) {
        ldct::Tensor t = ldct::read_tensor(path.string());
        if (t.ndim() != 2) throw ldct::DataError("slice tensor must be {H,W}: " + path.string());
        ldct::ctio::CTSlice s;
        s.rows = t.dim(0);
        s.cols = t.dim(1);
        s.pixels = std::move(t);
        s.slice_index = index++;
        s.series_id = dir;
        slices.push_back(std::move(s));
    }
    if (slices.empty()) throw ldct::EmptyDataset("no .tns slices in " + dir);
    return ldct::ctio::DomainDataset(tag, std::move(slices), seed);
}

ldct::Tensor as_hw(const ldct::Tensor& t) {
    if (t.ndim() == 2) return t;
    if (t.ndim() == 3 && t.dim(0) == 1) return ldct::Tensor({t.dim(1), t.dim(2)}, t.vec());
    throw ldct::ShapeMismatch("expected {H,W} or {1,H,W} tensor");
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_window(const json& cfg, const std::string& input_dir, const std::string& output_dir) {
    const auto spec = window_from_config(cfg);
    const std::string out = resolve_output_dir(output_dir);
    fs::create_directories(out);
    json resolved = cfg;
    resolved["window"] = window_as_json(spec);
    write_resolved_config(resolved, out);

    int failures = 0, written = 0;
    for (const auto& path : sorted_files(input_dir, "")) {
        try {
            const ldct::ctio::CTSlice slice = ldct::ctio::parse_dicom_file(path.string());
            const ldct::Tensor display = ldct::ctio::apply_window(slice, spec);
            const std::string stem = path.stem().string();
            ldct::write_tensor(display, out + "/" + stem + ".tns");
            ldct::write_png_gray8(out + "/" + stem + ".png", display, spec.y_min, spec.y_max);
            ++written;
        } catch (const std::exception& e) {
            std::cerr << "error: " << path.string() << ": " << e.what() << "\n";
            ++failures;
        }
    }
    std::cout << "windowed " << written << " file(s), " << failures << " failure(s)\n";
    return failures == 0 ? kExitOk : kExitData;
}

int cmd_phantom(const json& cfg, int count, const std::string& output_dir) {
    ldct::ctio::PhantomSpec spec = phantom_spec_from(cfg);
    if (count < 0) throw ldct::ConfigError("phantom: count must be >= 0");
    const std::string out = resolve_output_dir(output_dir);
    fs::create_directories(out);
    const auto window = window_from_config(cfg);
    json resolved = cfg;
    resolved["window"] = window_as_json(window);
    resolved["phantom"] = {{"size_px", spec.size_px},
                           {"disc_contrast_pct", spec.disc_contrast_pct},
                           {"disc_diameter_px", spec.disc_diameter_px},
                           {"noise_sigma_hu", spec.noise_sigma_hu},
                           {"photon_scale", spec.photon_scale},
                           {"seed", spec.seed},
                           {"count", count}};
    write_resolved_config(resolved, out);
    json manifest;
    manifest["spec"] = {{"size_px", spec.size_px},
                        {"disc_contrast_pct", spec.disc_contrast_pct},
                        {"disc_diameter_px", spec.disc_diameter_px},
                        {"noise_sigma_hu", spec.noise_sigma_hu},
                        {"photon_scale", spec.photon_scale},
                        {"seed", spec.seed}};
    manifest["count"] = count;
    json items = json::array();
    for (int i = 0; i < count; ++i) {
        ldct::ctio::PhantomSpec s = spec;
        s.seed = spec.seed + static_cast<std::uint64_t>(i);
        const auto pair = ldct::ctio::make_phantom(s);
        char name[64];
        std::snprintf(name, sizeof name, "ndct_%04d.tns", i);
        ldct::write_tensor(pair.ndct.pixels, out + "/" + name);
        json item{{"ndct", name}};
        std::snprintf(name, sizeof name, "ldct_%04d.tns", i);
        ldct::write_tensor(pair.ldct.pixels, out + "/" + name);
        item["ldct"] = name;
        item["seed"] = s.seed;
        items.push_back(item);
        if (i == 0) {
            ldct::write_png_gray8(out + "/preview_ndct.png",
                                  ldct::ctio::apply_window(pair.ndct.pixels, window), window.y_min,
                                  window.y_max);
            ldct::write_png_gray8(out + "/preview_ldct.png",
                                  ldct::ctio::apply_window(pair.ldct.pixels, window), window.y_min,
                                  window.y_max);
        }
    }
    manifest["items"] = items;
    std::ofstream mf(out + "/manifest.json");
    mf << manifest.dump(2) << "\n";
    std::cout << "wrote " << count << " phantom pair(s) to " << out << "\n";
    return kExitOk;
}

struct PreparedData {
    ldct::train::PreparedDomain x, y;
    std::vector<ldct::train::ValidationPair> validation;
};

PreparedData prepare_data(const json& cfg, bool slab_mode, std::uint64_t seed) {
    const json d = cfg.value("data", json::object());
    if (!d.contains("ldct_dir") || !d.contains("ndct_dir"))
        throw ldct::ConfigError("config: data.ldct_dir and data.ndct_dir are required");
    const auto window = window_from_config(cfg);
    const auto ldct_set =
        load_slice_dir(d.at("ldct_dir").get<std::string>(), ldct::ctio::DomainTag::LDCT, seed);
    const auto ndct_set =
        load_slice_dir(d.at("ndct_dir").get<std::string>(), ldct::ctio::DomainTag::NDCT, seed + 1);
    PreparedData out;
    out.x = ldct::train::prepare_domain(ldct_set, window, slab_mode);
    out.y = ldct::train::prepare_domain(ndct_set, window, slab_mode);
    if (d.contains("val_ldct_dir") && d.contains("val_ndct_dir")) {
        const auto vx =
            load_slice_dir(d.at("val_ldct_dir").get<std::string>(), ldct::ctio::DomainTag::LDCT, seed);
        const auto vy =
            load_slice_dir(d.at("val_ndct_dir").get<std::string>(), ldct::ctio::DomainTag::NDCT, seed);
        if (vx.size() != vy.size()) throw ldct::DataError("validation dirs must pair one-to-one");
        const auto vin = ldct::train::prepare_domain(vx, window, slab_mode);
        for (std::size_t i = 0; i < vin.size(); ++i) {
            ldct::train::ValidationPair vp;
            vp.input_model = vin[i];
            vp.target_display = ldct::ctio::apply_window(vy.slice(i).pixels, window);
            out.validation.push_back(std::move(vp));
        }
    }
    return out;
}

int run_training(ldct::train::Trainer& trainer, const json& cfg, const std::string& output_dir,
                 bool slab_mode) {
    const std::string out = resolve_output_dir(output_dir);
    fs::create_directories(out);
    json resolved = cfg;
    resolved["train"] = trainer.config();
    resolved["window"] = window_as_json(window_from_config(cfg));
    resolved["model"]["spec_hash"] = trainer.architecture_hash();
    write_resolved_config(resolved, out);

    const PreparedData data = prepare_data(cfg, slab_mode, trainer.config().seed);
    const auto log = trainer.train(data.x, data.y, data.validation.empty() ? nullptr : &data.validation, out);
    if (!log.epochs.empty()) {
        const auto& last = log.epochs.back();
        std::cout << "final epoch " << last.epoch << ": total=" << last.mean_losses.total
                  << " cyc=" << last.mean_losses.cyc;
        if (last.val_psnr) std::cout << " val_psnr=" << *last.val_psnr;
        std::cout << "\n";
    }
    std::cout << "checkpoints and logs in " << out << "\n";
    return kExitOk;
}

int cmd_train(const json& cfg, const std::string& output_dir, const std::string& resume_from) {
    const json d = cfg.value("data", json::object());
    const bool slab_mode = d.value("slab_mode", false);
    if (!resume_from.empty()) {
        ldct::train::TrainConfig tc = ldct::train::checkpoint_train_config(resume_from);
        if (cfg.contains("train")) {
            // Allow extending the run; everything else comes from the checkpoint.
            const json t = cfg.at("train");
            if (t.contains("epochs")) tc.epochs = t.at("epochs").get<int>();
        }
        auto trainer = ldct::train::Trainer::load_checkpoint(resume_from, tc, false);
        return run_training(trainer, cfg, output_dir, slab_mode);
    }
    ldct::train::Trainer trainer(generator_from_config(cfg), discriminator_from_config(cfg),
                                 train_config_from(cfg));
    return run_training(trainer, cfg, output_dir, slab_mode);
}

int cmd_finetune(const json& cfg, const std::string& from, const std::string& output_dir) {
    if (cfg.contains("model")) {
        const std::string want = ldct::model::spec_hash(generator_from_config(cfg),
                                                        discriminator_from_config(cfg));
        const std::string have = ldct::train::checkpoint_spec_hash(from);
        if (want != have)
            throw ldct::SpecHashMismatch("finetune: config model spec hash " + want +
                                         " does not match checkpoint " + have);
    }
    auto trainer = ldct::train::Trainer::load_checkpoint(from, train_config_from(cfg), true);
    const json d = cfg.value("data", json::object());
    return run_training(trainer, cfg, output_dir, d.value("slab_mode", false));
}

int cmd_migrate25d(const json& cfg, const std::string& from, const std::string& output_dir) {
    auto trainer = ldct::train::Trainer::migrate_to_2p5d(from, train_config_from(cfg));
    return run_training(trainer, cfg, output_dir, true);
}

int cmd_infer(const json& cfg, const std::string& checkpoint, const std::string& input_dir,
              const std::string& output_dir) {
    if (cfg.contains("model")) {
        const std::string want = ldct::model::spec_hash(generator_from_config(cfg),
                                                        discriminator_from_config(cfg));
        const std::string have = ldct::train::checkpoint_spec_hash(checkpoint);
        if (want != have)
            throw ldct::SpecHashMismatch("infer: config model spec hash " + want +
                                         " does not match checkpoint " + have);
    }
    const auto gspec = ldct::train::checkpoint_generator_spec(checkpoint);
    const auto params = ldct::train::load_generator_params(checkpoint, "G");
    const ldct::model::Generator g(gspec, params);
    const auto window = window_from_config(cfg);
    const std::string out = resolve_output_dir(output_dir);
    fs::create_directories(out);
    json resolved = cfg;
    resolved["window"] = window_as_json(window);
    write_resolved_config(resolved, out);

    // Inputs are HU slice tensors; outputs are display-space slices.
    std::vector<ldct::ctio::CTSlice> volume;
    std::vector<std::string> stems;
    int index = 0;
    for (const auto& path : sorted_files(input_dir, ".tns")) {
        ldct::Tensor t = ldct::read_tensor(path.string());
        ldct::ctio::CTSlice s;
        s.pixels = as_hw(t);
        s.rows = s.pixels.dim(0);
        s.cols = s.pixels.dim(1);
        s.slice_index = index++;
        s.series_id = input_dir;
        volume.push_back(std::move(s));
        stems.push_back(path.stem().string());
    }
    if (volume.empty()) throw ldct::EmptyDataset("infer: no .tns slices in " + input_dir);

    auto to_model = [&](const ldct::Tensor& hu) {
        return ldct::ctio::normalize_for_model(ldct::ctio::apply_window(hu, window), window.y_min,
                                               window.y_max);
    };
    for (std::size_t i = 0; i < volume.size(); ++i) {
        ldct::Tensor input;
        if (gspec.input_slices == 3) {
            const auto slab = ldct::ctio::stack_neighbors(volume, static_cast<int>(i));
            const ldct::Tensor a = to_model(slab.above.pixels);
            const ldct::Tensor c = to_model(slab.center.pixels);
            const ldct::Tensor b = to_model(slab.below.pixels);
            input = ldct::Tensor({1, 3, a.dim(0), a.dim(1)});
            const std::int64_t plane = a.numel();
            for (std::int64_t k = 0; k < plane; ++k) {
                input[k] = a[k];
                input[plane + k] = c[k];
                input[2 * plane + k] = b[k];
            }
        } else {
            const ldct::Tensor m = to_model(volume[i].pixels);
            input = ldct::Tensor({1, m.dim(0), m.dim(1)}, m.vec());
        }
        const ldct::Tensor y = g.infer(input);
        const ldct::Tensor display =
            ldct::ctio::denormalize(ldct::Tensor({y.dim(1), y.dim(2)}, y.vec()), window.y_min, window.y_max);
        ldct::write_tensor(display, out + "/" + stems[i] + "_denoised.tns");
        ldct::write_png_gray8(out + "/" + stems[i] + "_denoised.png", display, window.y_min, window.y_max);
    }
    std::cout << "denoised " << volume.size() << " slice(s) into " << out << "\n";
    return kExitOk;
}

int cmd_evaluate(const json& cfg, const std::string& ref_dir, const std::string& test_dir,
                 const std::string& output_dir) {
    const json m = cfg.value("metrics", json::object());
    const std::string space = m.value("space", std::string("display"));
    const auto window = window_from_config(cfg);

    auto strip = [](std::string stem) {
        const std::string suffix = "_denoised";
        if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)
            stem.resize(stem.size() - suffix.size());
        return stem;
    };

    std::map<std::string, fs::path> ref_files, test_files;
    for (const auto& p : sorted_files(ref_dir, ".tns")) ref_files[strip(p.stem().string())] = p;
    for (const auto& p : sorted_files(test_dir, ".tns")) test_files[strip(p.stem().string())] = p;
    if (ref_files.empty()) throw ldct::EmptyDataset("evaluate: no .tns files in " + ref_dir);

    std::vector<ldct::metrics::EvalItem> items;
    for (const auto& [stem, rp] : ref_files) {
        auto it = test_files.find(stem);
        if (it == test_files.end())
            throw ldct::DataError("evaluate: no counterpart for '" + stem + "' in " + test_dir);
        ldct::metrics::EvalItem item;
        item.id = stem;
        item.reference = as_hw(ldct::read_tensor(rp.string()));
        item.test = as_hw(ldct::read_tensor(it->second.string()));
        if (space == "hu") {
            // HU inputs: full-reference metrics run in the fixed display
            // window, ROI metrics stay in HU.
            item.test_hu = item.test;
            item.reference = ldct::ctio::apply_window(item.reference, window);
            item.test = ldct::ctio::apply_window(item.test, window);
        } else if (space != "display") {
            throw ldct::ConfigError("config: metrics.space must be display or hu");
        }
        items.push_back(std::move(item));
    }

    ldct::metrics::EvalConfig ec;
    ec.max_value = m.value("max_value", 255.0);
    ec.norm_lo = window.y_min;
    ec.norm_hi = window.y_max;
    ec.roi_signal = roi_from(m, "roi_signal");
    ec.roi_background = roi_from(m, "roi_background");
    {
        char note[160];
        std::snprintf(note, sizeof note,
                      "window level %.1f width %.1f (%s space); CNR denominator: background std",
                      window.level_c, window.width_w, space.c_str());
        ec.window_note = note;
    }
    const auto report = ldct::metrics::evaluate_report(items, ec);

    const std::string out = resolve_output_dir(output_dir);
    fs::create_directories(out);
    json resolved = cfg;
    resolved["window"] = window_as_json(window);
    write_resolved_config(resolved, out);
    std::ofstream table(out + "/report.txt");
    table << report.table();
    report.write_jsonl(out + "/report.jsonl");
    std::cout << report.table();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unpaired CT denoising toolkit"};
    app.require_subcommand(1);

    std::string config_path, input_dir, output_dir, ref_dir, test_dir, checkpoint, resume_from;
    int count = 10;
    double level = std::nan(""), width = std::nan("");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--output", output_dir, "output directory (overrides config output_dir)");
    };

    CLI::App* window_cmd = app.add_subcommand("window", "apply display windowing to DICOM slices");
    window_cmd->add_option("--input", input_dir, "directory of DICOM files")->required();
    add_common(window_cmd);
    window_cmd->add_option("--level", level, "window level override");
    window_cmd->add_option("--width", width, "window width override");

    CLI::App* phantom_cmd = app.add_subcommand("phantom", "generate synthetic phantom pairs");
    add_common(phantom_cmd);
    phantom_cmd->add_option("--count", count, "number of phantom pairs");

    CLI::App* train_cmd = app.add_subcommand("train", "train the four-network loop");
    add_common(train_cmd);
    train_cmd->add_option("--resume", resume_from, "checkpoint directory to resume from");

    CLI::App* finetune_cmd = app.add_subcommand("finetune", "fine-tune from a checkpoint");
    add_common(finetune_cmd);
    finetune_cmd->add_option("--from", checkpoint, "source checkpoint")->required();

    CLI::App* migrate_cmd = app.add_subcommand("migrate25d", "inflate a 2D checkpoint and train on slabs");
    add_common(migrate_cmd);
    migrate_cmd->add_option("--from", checkpoint, "source 2D checkpoint")->required();

    CLI::App* infer_cmd = app.add_subcommand("infer", "denoise slices with a trained generator");
    infer_cmd->add_option("--checkpoint", checkpoint, "checkpoint directory")->required();
    infer_cmd->add_option("--input", input_dir, "directory of HU slice tensors")->required();
    add_common(infer_cmd);

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "image-quality report for paired directories");
    eval_cmd->add_option("--ref", ref_dir, "reference directory")->required();
    eval_cmd->add_option("--test", test_dir, "test directory")->required();
    add_common(eval_cmd);
    std::string roi_signal_flag, roi_background_flag;
    eval_cmd->add_option("--roi-signal", roi_signal_flag, "signal ROI as row,col,radius");
    eval_cmd->add_option("--roi-background", roi_background_flag, "background ROI as row,col,radius");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path);
        if (!std::isnan(level)) cfg["window"]["level"] = level;
        if (!std::isnan(width)) cfg["window"]["width"] = width;
        if (!roi_signal_flag.empty()) cfg["metrics"]["roi_signal"] = roi_json_from_flag(roi_signal_flag);
        if (!roi_background_flag.empty())
            cfg["metrics"]["roi_background"] = roi_json_from_flag(roi_background_flag);
        if (output_dir.empty()) output_dir = cfg.value("output_dir", std::string());
        if (output_dir.empty())
            throw ldct::ConfigError("config: no output directory (--output flag or output_dir key)");

        if (window_cmd->parsed()) return cmd_window(cfg, input_dir, output_dir);
        if (phantom_cmd->parsed()) {
            if (phantom_cmd->count("--count") == 0 && cfg.contains("phantom") &&
                cfg.at("phantom").contains("count"))
                count = cfg.at("phantom").at("count").get<int>();
            return cmd_phantom(cfg, count, output_dir);
        }
        if (train_cmd->parsed()) return cmd_train(cfg, output_dir, resume_from);
        if (finetune_cmd->parsed()) return cmd_finetune(cfg, checkpoint, output_dir);
        if (migrate_cmd->parsed()) return cmd_migrate25d(cfg, checkpoint, output_dir);
        if (infer_cmd->parsed()) return cmd_infer(cfg, checkpoint, input_dir, output_dir);
        if (eval_cmd->parsed()) return cmd_evaluate(cfg, ref_dir, test_dir, output_dir);
        return kExitUsage;
    } catch (const ldct::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ldct::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ldct::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

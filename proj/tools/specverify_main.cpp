// Command-line front end: simulation, training, verification, falsification,
// sweeps and decision surfaces over the library.

#include "specverify/datasets.hpp"
#include "specverify/digitgen.hpp"
#include "specverify/falsify.hpp"
#include "specverify/network.hpp"
#include "specverify/physics.hpp"
#include "specverify/specs.hpp"
#include "specverify/surface.hpp"
#include "specverify/train.hpp"
#include "specverify/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sv = specverify;

namespace {

std::uint64_t env_seed_fallback() {
    if (const char* env = std::getenv("SPECVERIFY_SEED")) {
        return static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    }
    return 0;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        values.push_back(std::stod(token));
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        values.push_back(std::stoi(token));
    }
    return values;
}

// Inputs resolved from either a pendulum CSV or an IDX image/label pair.
struct DataSource {
    std::string csv_path;
    std::string images_path;
    std::string labels_path;

    bool is_images() const { return !images_path.empty(); }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--dataset,--data", csv_path,
                        "pendulum CSV (state,next-state pairs)");
        cmd->add_option("--idx-images", images_path, "IDX image file");
        cmd->add_option("--idx-labels", labels_path, "IDX label file");
    }

    void validate() const {
        if (csv_path.empty() && images_path.empty()) {
            throw sv::ConfigError("no dataset given: use --dataset or --idx-images/--idx-labels");
        }
        if (!images_path.empty() && labels_path.empty()) {
            throw sv::ConfigError("--idx-images requires --idx-labels");
        }
    }
};

// Specification source: a JSON file or one of the built-in constructions.
struct SpecSource {
    std::string spec_path;
    std::string distances_path;
    double epsilon = 0.23;
    bool energy = false;
    sv::EnergyParams energy_params;
    int digits = 0;
    double digit_epsilon = 1.0;
    double entropy_floor = std::numeric_limits<double>::quiet_NaN();

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--spec", spec_path, "specification JSON file");
        cmd->add_option("--semantic-distances", distances_path,
                        "label-distance matrix JSON; builds a semantic softmax spec per example");
        cmd->add_option("--epsilon", epsilon, "semantic distance threshold")
            ->capture_default_str();
        cmd->add_flag("--energy", energy, "pendulum energy conservation spec");
        cmd->add_option("--mass", energy_params.mass)->capture_default_str();
        cmd->add_option("--length", energy_params.length)->capture_default_str();
        cmd->add_option("--gravity", energy_params.gravity)->capture_default_str();
        cmd->add_option("--velocity-scale", energy_params.velocity_scale)->capture_default_str();
        cmd->add_option("--digit-sum", digits,
                        "digit-sum spec over N consecutive examples (targets = their labels)");
        cmd->add_option("--digit-epsilon", digit_epsilon)->capture_default_str();
        cmd->add_option("--entropy-floor", entropy_floor, "entropy specification floor");
    }
};

struct AttackFlags {
    int steps = 100;
    int restarts = 20;
    double step_size = 0.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--pgd-steps", steps)->capture_default_str();
        cmd->add_option("--pgd-restarts", restarts)->capture_default_str();
        cmd->add_option("--step-size", step_size, "PGD step size (default delta/4)");
    }

    sv::AttackConfig config(std::uint64_t seed) const {
        sv::AttackConfig cfg;
        cfg.steps = steps;
        cfg.restarts = restarts;
        cfg.step_size = step_size;
        cfg.seed = seed;
        return cfg;
    }
};

struct LoadedData {
    std::vector<sv::Vector> inputs;
    std::vector<int> labels;   // empty for pendulum data
    bool images = false;
};

LoadedData load_inputs(const DataSource& src) {
    src.validate();
    LoadedData data;
    if (src.is_images()) {
        sv::LabeledDataset ds = sv::load_mnist_idx(src.images_path, src.labels_path);
        data.inputs = std::move(ds.inputs);
        data.labels = std::move(ds.labels);
        data.images = true;
    } else {
        for (const sv::StatePair& pair : sv::load_pendulum_csv(src.csv_path)) {
            data.inputs.push_back(pair.input);
        }
    }
    return data;
}

// Builds the per-example test items a spec source induces on a dataset.
std::vector<sv::SweepItem> build_items(const SpecSource& spec_src, const LoadedData& raw,
                                       long limit, long offset = 0) {
    LoadedData data;
    const std::size_t skip =
        std::min(raw.inputs.size(), static_cast<std::size_t>(std::max<long>(offset, 0)));
    data.images = raw.images;
    data.inputs.assign(raw.inputs.begin() + static_cast<long>(skip), raw.inputs.end());
    if (!raw.labels.empty()) {
        data.labels.assign(raw.labels.begin() + static_cast<long>(skip), raw.labels.end());
    }
    std::vector<sv::SweepItem> items;
    const std::size_t count =
        limit > 0 ? std::min<std::size_t>(data.inputs.size(), static_cast<std::size_t>(limit))
                  : data.inputs.size();
    if (!spec_src.spec_path.empty()) {
        const sv::Specification spec = sv::load_spec(spec_src.spec_path);
        const int arity = sv::spec_arity(spec);
        for (std::size_t i = 0; i + static_cast<std::size_t>(arity) <= count;
             i += static_cast<std::size_t>(arity)) {
            sv::SweepItem item;
            for (int n = 0; n < arity; ++n) {
                item.centers.push_back(data.inputs[i + static_cast<std::size_t>(n)]);
            }
            item.spec = spec;
            items.push_back(std::move(item));
        }
        return items;
    }
    if (!spec_src.distances_path.empty()) {
        const sv::Matrix distances = sv::load_distance_matrix(spec_src.distances_path);
        if (data.labels.empty()) {
            throw sv::ConfigError("semantic spec needs a labeled dataset");
        }
        for (std::size_t i = 0; i < count; ++i) {
            sv::SweepItem item;
            item.centers.push_back(data.inputs[i]);
            item.spec = sv::SemanticSoftmaxSpec{
                sv::distance_row(distances, data.labels[i]), spec_src.epsilon};
            items.push_back(std::move(item));
        }
        return items;
    }
    if (spec_src.energy) {
        const sv::QuadraticSpec spec = sv::build_energy_Q(spec_src.energy_params);
        for (std::size_t i = 0; i < count; ++i) {
            items.push_back({{data.inputs[i]}, spec});
        }
        return items;
    }
    if (spec_src.digits > 0) {
        if (data.labels.empty()) {
            throw sv::ConfigError("digit-sum spec needs a labeled dataset");
        }
        const std::size_t n = static_cast<std::size_t>(spec_src.digits);
        for (std::size_t i = 0; i + n <= count; i += n) {
            sv::SweepItem item;
            sv::DigitSumSpec spec;
            spec.epsilon = spec_src.digit_epsilon;
            spec.n_labels = 10;
            for (std::size_t k = 0; k < n; ++k) {
                item.centers.push_back(data.inputs[i + k]);
                spec.targets.push_back(data.labels[i + k]);
            }
            item.spec = std::move(spec);
            items.push_back(std::move(item));
        }
        return items;
    }
    if (!std::isnan(spec_src.entropy_floor)) {
        for (std::size_t i = 0; i < count; ++i) {
            items.push_back({{data.inputs[i]}, sv::EntropySpec{spec_src.entropy_floor}});
        }
        return items;
    }
    throw sv::ConfigError(
        "no specification given: use --spec, --semantic-distances, --energy, --digit-sum or "
        "--entropy-floor");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Convex-relaxation verification and PGD falsification of nonlinear "
                 "specifications on feedforward ReLU networks"};
    app.require_subcommand(1);

    std::uint64_t seed = env_seed_fallback();
    app.add_option("--seed", seed, "RNG seed (SPECVERIFY_SEED env as fallback)")
        ->capture_default_str();
    app.fallthrough();  // lets every subcommand accept --seed

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate pendulum (state, next state) pairs");
    int sim_n = 90000;
    std::string sim_out;
    sv::PendulumParams sim_params;
    sim->add_option("--n", sim_n, "number of pairs")->capture_default_str();
    sim->add_option("--out", sim_out, "output CSV path")->required();
    sim->add_option("--damping", sim_params.damping)->capture_default_str();
    sim->add_option("--dt", sim_params.dt_sample, "sample interval (s)")->capture_default_str();
    sim->add_option("--dt-inner", sim_params.dt_inner, "integration substep (s)")
        ->capture_default_str();
    sim->add_option("--mass", sim_params.mass)->capture_default_str();
    sim->add_option("--length", sim_params.length)->capture_default_str();
    sim->add_option("--gravity", sim_params.gravity)->capture_default_str();

    // ---- gen-digits ----
    auto* gen = app.add_subcommand("gen-digits",
                                   "write a deterministic rendered digit corpus in IDX format");
    int gen_count = 10000;
    std::string gen_images, gen_labels;
    gen->add_option("--count", gen_count)->capture_default_str();
    gen->add_option("--out-images", gen_images)->required();
    gen->add_option("--out-labels", gen_labels)->required();

    // ---- train ----
    auto* tr = app.add_subcommand("train", "train a model on pendulum or digit data");
    DataSource tr_data;
    tr_data.add_flags(tr);
    std::string tr_loss = "l1";
    std::string tr_out;
    std::string tr_log;
    sv::LossConfig tr_cfg;
    double tr_test_frac = 0.3;
    std::vector<int> tr_hidden;
    tr->add_option("--loss", tr_loss, "l1 | l1+energy | ce | ce-adv")->capture_default_str();
    tr->add_option("--out", tr_out, "model output path")->required();
    tr->add_option("--log", tr_log, "training log CSV path");
    tr->add_option("--lr", tr_cfg.learning_rate)->capture_default_str();
    tr->add_option("--epochs", tr_cfg.epochs)->capture_default_str();
    tr->add_option("--batch", tr_cfg.batch_size)->capture_default_str();
    tr->add_option("--adv-delta", tr_cfg.adv_delta, "PGD training radius (/255 for images)")
        ->capture_default_str();
    tr->add_option("--adv-steps", tr_cfg.adv_steps)->capture_default_str();
    tr->add_option("--test-frac", tr_test_frac, "fraction of pairs held out by index")
        ->capture_default_str();
    tr->add_option("--hidden", tr_hidden, "hidden layer widths");

    // ---- verify / falsify ----
    auto add_check_flags = [&](CLI::App* cmd, DataSource& data, SpecSource& spec,
                               AttackFlags& attack, std::string& model,
                               std::string& input_index, double& delta, int& tangents,
                               bool& tighten, std::string& dump_lp) {
        cmd->add_option("--model", model, "model JSON file")->required();
        data.add_flags(cmd);
        spec.add_flags(cmd);
        attack.add_flags(cmd);
        cmd->add_option("--input-index", input_index,
                        "example index (comma list for multi-copy specs)")
            ->required();
        cmd->add_option("--delta", delta, "perturbation radius (/255 units for image data)")
            ->required();
        cmd->add_option("--tangents", tangents, "tangent cuts per relaxed atom")
            ->capture_default_str();
        cmd->add_flag("--tighten-bounds", tighten, "LP-tighten intermediate bounds");
        cmd->add_option("--dump-lp", dump_lp, "write the LP in text form to this path");
    };

    auto* ver = app.add_subcommand("verify", "verify one example via the LP relaxation");
    DataSource ver_data;
    SpecSource ver_spec;
    AttackFlags ver_attack;
    std::string ver_model, ver_index, ver_dump;
    double ver_delta = 0.0;
    int ver_tangents = 5;
    bool ver_tighten = false;
    add_check_flags(ver, ver_data, ver_spec, ver_attack, ver_model, ver_index, ver_delta,
                    ver_tangents, ver_tighten, ver_dump);

    auto* fal = app.add_subcommand("falsify", "attack one example with PGD");
    DataSource fal_data;
    SpecSource fal_spec;
    AttackFlags fal_attack;
    std::string fal_model, fal_index, fal_dump;
    double fal_delta = 0.0;
    int fal_tangents = 5;
    bool fal_tighten = false;
    add_check_flags(fal, fal_data, fal_spec, fal_attack, fal_model, fal_index, fal_delta,
                    fal_tangents, fal_tighten, fal_dump);

    // ---- sweep ----
    auto* sw = app.add_subcommand("sweep", "verification/adversarial bounds over a delta list");
    DataSource sw_data;
    SpecSource sw_spec;
    AttackFlags sw_attack;
    std::string sw_model, sw_out, sw_deltas = "0,0.02,0.04,0.06";
    int sw_jobs = 0, sw_tangents = 5;
    long sw_limit = 0, sw_offset = 0;
    bool sw_tighten = false, sw_no_timing = false;
    sw->add_option("--model", sw_model)->required();
    sw_data.add_flags(sw);
    sw_spec.add_flags(sw);
    sw_attack.add_flags(sw);
    sw->add_option("--deltas", sw_deltas, "comma-separated radii (/255 units for image data)")
        ->capture_default_str();
    sw->add_option("--out", sw_out, "report CSV path")->required();
    sw->add_option("--jobs", sw_jobs, "worker threads (0 = cores)")->capture_default_str();
    sw->add_option("--limit", sw_limit, "cap the number of test examples")->capture_default_str();
    sw->add_option("--offset", sw_offset, "skip this many leading examples")->capture_default_str();
    sw->add_option("--tangents", sw_tangents)->capture_default_str();
    sw->add_flag("--tighten-bounds", sw_tighten);
    sw->add_flag("--no-timing", sw_no_timing, "write wall_ms=0 for byte-reproducible output");

    // ---- surface ----
    auto* su = app.add_subcommand("surface", "decision boundaries on an image interpolation plane");
    DataSource su_data;
    std::string su_model, su_images, su_out;
    int su_grid = 101;
    double su_lo = -0.2, su_hi = 1.2;
    su->add_option("--model", su_model)->required();
    su_data.add_flags(su);
    su->add_option("--images", su_images, "three dataset indices a,b,c")->required();
    su->add_option("--grid", su_grid)->capture_default_str();
    su->add_option("--range-lo", su_lo)->capture_default_str();
    su->add_option("--range-hi", su_hi)->capture_default_str();
    su->add_option("--out", su_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help() << "\n";
        return 2;
    }

    if (sim->parsed()) {
        const auto pairs = sv::generate_dataset(sim_n, seed, sim_params);
        sv::write_pendulum_csv(pairs, sim_out);
        std::cout << "pairs=" << pairs.size() << "\nout=" << sim_out << "\n";
        return 0;
    }

    if (gen->parsed()) {
        const sv::DigitCorpus corpus = sv::generate_digits(gen_count, seed);
        sv::write_idx_images(corpus.images, gen_images);
        sv::write_idx_labels(corpus.labels, gen_labels);
        std::cout << "count=" << corpus.images.size() << "\nout_images=" << gen_images
                  << "\nout_labels=" << gen_labels << "\n";
        return 0;
    }

    if (tr->parsed()) {
        const LoadedData data = load_inputs(tr_data);
        tr_cfg.seed = seed;
        if (tr_loss == "l1") {
            tr_cfg.kind = sv::LossKind::L1;
        } else if (tr_loss == "l1+energy") {
            tr_cfg.kind = sv::LossKind::L1PlusEnergy;
        } else if (tr_loss == "ce") {
            tr_cfg.kind = sv::LossKind::CrossEntropy;
        } else if (tr_loss == "ce-adv") {
            tr_cfg.kind = sv::LossKind::CrossEntropyAdversarial;
        } else {
            throw sv::ConfigError("unknown loss '" + tr_loss + "'");
        }
        const bool classification =
            tr_cfg.kind == sv::LossKind::CrossEntropy ||
            tr_cfg.kind == sv::LossKind::CrossEntropyAdversarial;
        if (classification) {
            tr_cfg.adv_delta /= 255.0;  // flag arrives in /255 units for images
        }

        sv::TrainingData train_set, test_set;
        const std::size_t total = data.inputs.size();
        const std::size_t train_count =
            total - static_cast<std::size_t>(tr_test_frac * static_cast<double>(total));
        if (data.images) {
            for (std::size_t i = 0; i < total; ++i) {
                auto& dst = (i < train_count) ? train_set : test_set;
                dst.inputs.push_back(data.inputs[i]);
                dst.labels.push_back(data.labels[i]);
            }
        } else {
            const auto pairs = sv::load_pendulum_csv(tr_data.csv_path);
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                auto& dst = (i < train_count) ? train_set : test_set;
                dst.inputs.push_back(pairs[i].input);
                dst.targets.push_back(pairs[i].target);
            }
        }

        std::vector<int> dims;
        dims.push_back(static_cast<int>(train_set.inputs.front().size()));
        if (tr_hidden.empty()) {
            dims.push_back(data.images ? 20 : 16);
        } else {
            dims.insert(dims.end(), tr_hidden.begin(), tr_hidden.end());
        }
        dims.push_back(data.images ? 10 : 3);
        const sv::Network init = sv::init_mlp("model", dims, seed);
        const sv::TrainResult result = sv::train(init, train_set, test_set, tr_cfg);
        sv::save_model(result.net, tr_out);
        if (!tr_log.empty()) {
            sv::write_train_log_csv(result.log, tr_log);
        }
        std::cout << "out=" << tr_out << "\n";
        if (!result.log.empty()) {
            std::cout << "final_train_loss=" << result.log.back().train_loss
                      << "\nfinal_test_metric=" << result.log.back().test_metric << "\n";
        }
        return 0;
    }

    const auto run_check = [&](bool attack_only, const DataSource& data_src,
                               const SpecSource& spec_src, const AttackFlags& attack,
                               const std::string& model_path, const std::string& index_text,
                               double delta, int tangents, bool tighten,
                               const std::string& dump_lp) -> int {
        const sv::Network net = sv::load_model(model_path);
        const LoadedData data = load_inputs(data_src);
        if (data.images) delta /= 255.0;

        const std::vector<int> indices = parse_int_list(index_text);
        sv::SweepItem item;
        if (indices.size() == 1) {
            const std::vector<sv::SweepItem> all_items = build_items(spec_src, data, 0);
            const std::size_t i = static_cast<std::size_t>(indices[0]);
            if (i >= all_items.size()) throw sv::ConfigError("--input-index out of range");
            item = all_items[i];
        } else {
            // Multiple indices name the copies of one multi-input example.
            for (int idx : indices) {
                const std::size_t i = static_cast<std::size_t>(idx);
                if (i >= data.inputs.size()) throw sv::ConfigError("--input-index out of range");
                item.centers.push_back(data.inputs[i]);
            }
            if (!spec_src.spec_path.empty()) {
                item.spec = sv::load_spec(spec_src.spec_path);
                if (static_cast<std::size_t>(sv::spec_arity(item.spec)) != indices.size()) {
                    throw sv::ConfigError("--input-index count does not match spec arity");
                }
            } else {
                if (data.labels.empty()) {
                    throw sv::ConfigError("digit-sum over indices needs a labeled dataset");
                }
                sv::DigitSumSpec spec;
                spec.epsilon = spec_src.digit_epsilon;
                spec.n_labels = 10;
                for (int idx : indices) {
                    spec.targets.push_back(data.labels[static_cast<std::size_t>(idx)]);
                }
                item.spec = std::move(spec);
            }
        }

        std::vector<sv::InputRegion> regions;
        for (const sv::Vector& center : item.centers) {
            if (data.images) {
                regions.push_back(sv::make_region(center, delta, 0.0, 1.0));
            } else {
                regions.push_back(sv::make_region(center, delta));
            }
        }
        std::vector<const sv::Network*> nets(item.centers.size(), &net);

        if (attack_only) {
            const auto witness = sv::pgd_falsify(nets, item.spec, regions, attack.config(seed));
            if (witness) {
                std::cout << "FALSIFIED, value=" << witness->value << "\n"
                          << "status=FALSIFIED\nvalue=" << witness->value << "\n";
                return 1;
            }
            std::cout << "NOT-FALSIFIED\nstatus=NOT_FALSIFIED\n";
            return 0;
        }

        sv::VerifyOptions opts;
        opts.n_tangents = tangents;
        opts.tighten_bounds = tighten;
        opts.attack = attack.config(seed);
        opts.dump_lp_path = dump_lp;
        const sv::VerificationOutcome out = sv::verify_example(nets, item.spec, regions, opts);
        switch (out.status) {
            case sv::VerifyStatus::Verified:
                std::cout << "VERIFIED, lp_max=" << out.relaxation_optimum << "\n"
                          << "status=VERIFIED\nlp_max=" << out.relaxation_optimum << "\n";
                return 0;
            case sv::VerifyStatus::Unknown:
                std::cout << "UNKNOWN, lp_max=" << out.relaxation_optimum << "\n"
                          << "status=UNKNOWN\nlp_max=" << out.relaxation_optimum << "\n";
                return 0;
            case sv::VerifyStatus::Falsified:
                std::cout << "FALSIFIED, value=" << out.witness->value << "\n"
                          << "status=FALSIFIED\nlp_max=" << out.relaxation_optimum
                          << "\nvalue=" << out.witness->value << "\n";
                return 1;
        }
        return 3;
    };

    if (ver->parsed()) {
        return run_check(false, ver_data, ver_spec, ver_attack, ver_model, ver_index, ver_delta,
                         ver_tangents, ver_tighten, ver_dump);
    }
    if (fal->parsed()) {
        return run_check(true, fal_data, fal_spec, fal_attack, fal_model, fal_index, fal_delta,
                         fal_tangents, fal_tighten, fal_dump);
    }

    if (sw->parsed()) {
        const sv::Network net = sv::load_model(sw_model);
        const LoadedData data = load_inputs(sw_data);
        const std::vector<sv::SweepItem> items = build_items(sw_spec, data, sw_limit, sw_offset);
        sv::SweepConfig cfg;
        cfg.deltas = parse_double_list(sw_deltas);
        if (data.images) {
            for (double& d : cfg.deltas) d /= 255.0;
            cfg.clip_lo = 0.0;
            cfg.clip_hi = 1.0;
        }
        cfg.jobs = sw_jobs;
        cfg.timing = !sw_no_timing;
        cfg.seed = seed;
        cfg.verify.n_tangents = sw_tangents;
        cfg.verify.tighten_bounds = sw_tighten;
        cfg.verify.attack = sw_attack.config(seed);
        const sv::SweepReport report = sv::sweep(net, items, cfg);
        std::ofstream out(sw_out);
        if (!out) throw sv::IoError("sweep: cannot open '" + sw_out + "'");
        out << sv::report_to_csv(report);
        std::cout << "rows=" << report.rows.size() << "\nout=" << sw_out << "\n";
        return 0;
    }

    if (su->parsed()) {
        const sv::Network net = sv::load_model(su_model);
        const LoadedData data = load_inputs(su_data);
        const std::vector<int> idx = parse_int_list(su_images);
        if (idx.size() != 3) throw sv::ConfigError("surface: --images needs exactly 3 indices");
        for (int i : idx) {
            if (i < 0 || static_cast<std::size_t>(i) >= data.inputs.size()) {
                throw sv::ConfigError("surface: image index out of range");
            }
        }
        const auto points =
            sv::decision_surface(net, data.inputs[static_cast<std::size_t>(idx[0])],
                                 data.inputs[static_cast<std::size_t>(idx[1])],
                                 data.inputs[static_cast<std::size_t>(idx[2])], su_grid, su_lo,
                                 su_hi);
        sv::write_surface_csv(points, su_out);
        std::cout << "points=" << points.size() << "\nout=" << su_out << "\n";
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const CLI::ParseError&) {
        return 2;  // CLI11_PARSE already reported; defensive
    } catch (const sv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

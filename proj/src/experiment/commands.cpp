#include "speclearn/experiment/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "speclearn/causal.hpp"
#include "speclearn/errors.hpp"
#include "speclearn/io/svg.hpp"
#include "speclearn/irl.hpp"
#include "speclearn/refine.hpp"
#include "speclearn/rng.hpp"
#include "speclearn/stats.hpp"

namespace speclearn {

namespace {

using nlohmann::json;

std::string fmt(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string rgb_hex(const Rgb& c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r * 255)),
                  static_cast<int>(std::lround(c.g * 255)),
                  static_cast<int>(std::lround(c.b * 255)));
    return buf;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string());
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

uint64_t train_job_seed(uint64_t seed, const std::string& ablation, UserType type) {
    return derive_seed(seed, {0x7124ULL, hash_string(ablation), static_cast<uint64_t>(type)});
}

std::pair<int, int> eval_counts(const SpecModel& model, const Dataset& data,
                                const std::vector<nn::Tensor>& images) {
    const auto& eval = data.eval_demos[static_cast<size_t>(model.user_type())];
    int correct = 0, total = 0;
    for (size_t i = 0; i < data.train_scenes.size(); ++i) {
        if (eval[i].empty()) continue;
        const std::vector<double> mu = model.encode_mean(images[i]);
        std::vector<Vec2> thetas;
        thetas.reserve(eval[i].size());
        for (const auto& d : eval[i]) thetas.push_back(d.theta);
        const std::vector<double> preds = model.classify_batch(mu, thetas);
        for (size_t j = 0; j < preds.size(); ++j) {
            correct += (preds[j] >= 0.5) == eval[i][j].valid;
            ++total;
        }
    }
    return {correct, total};
}

std::pair<int, int> eval_counts_irl(const RewardModel& model, const Dataset& data,
                                    const std::vector<nn::Tensor>& images) {
    const auto& eval = data.eval_demos[static_cast<size_t>(model.user_type())];
    int correct = 0, total = 0;
    for (size_t i = 0; i < data.train_scenes.size(); ++i)
        for (const auto& d : eval[i]) {
            correct += model.classify(images[i], d.theta) == d.valid;
            ++total;
        }
    return {correct, total};
}

std::vector<nn::Tensor> render_all(const std::vector<Scene>& scenes) {
    std::vector<nn::Tensor> images;
    images.reserve(scenes.size());
    for (const auto& s : scenes) images.push_back(image_to_tensor(render_scene(s)));
    return images;
}

const std::map<std::string, std::string> kVariantColors = {{"full", "#1f77b4"},
                                                           {"ae", "#ff7f0e"},
                                                           {"classifier", "#2ca02c"},
                                                           {"irl", "#d62728"}};

void write_accuracy_svg(const ExperimentConfig& cfg, const std::vector<EvalAggregate>& aggs,
                        const std::filesystem::path& path) {
    const double W = 520, H = 360, L = 50, B = 40, T = 20, R = 120;
    const double plot_w = W - L - R, plot_h = H - T - B;
    int kmin = cfg.trajectories_per_scene.front(), kmax = cfg.trajectories_per_scene.front();
    for (int k : cfg.trajectories_per_scene) {
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    auto px = [&](double k) {
        return L + (kmax > kmin ? (k - kmin) / (kmax - kmin) : 0.5) * plot_w;
    };
    auto py = [&](double acc) { return T + (1.0 - acc) * plot_h; };

    SvgWriter svg(W, H);
    svg.line(L, T, L, H - B, "black");
    svg.line(L, H - B, W - R, H - B, "black");
    for (double yt = 0.0; yt <= 1.0001; yt += 0.25) {
        svg.line(L - 4, py(yt), L, py(yt), "black");
        svg.text(L - 8, py(yt) + 3, fmt(yt, "%.2f"), 9, "end");
        svg.line(L, py(yt), W - R, py(yt), "#dddddd", 0.5);
    }
    for (int k : cfg.trajectories_per_scene) {
        svg.line(px(k), H - B, px(k), H - B + 4, "black");
        svg.text(px(k), H - B + 14, std::to_string(k), 9, "middle");
    }
    svg.text((L + W - R) / 2, H - 8, "trajectories per scene", 11, "middle");

    std::vector<std::string> variants;
    for (const auto& a : aggs)
        if (std::find(variants.begin(), variants.end(), a.variant) == variants.end())
            variants.push_back(a.variant);
    double legend_y = T + 12;
    for (const auto& variant : variants) {
        std::vector<Vec2> pts;
        for (int k : cfg.trajectories_per_scene)
            for (const auto& a : aggs)
                if (a.variant == variant && a.k == k) pts.push_back({px(k), py(a.mean)});
        const auto it = kVariantColors.find(variant);
        const std::string color = it != kVariantColors.end() ? it->second : "#777777";
        svg.polyline(pts, color, 1.8);
        for (const auto& p : pts) svg.circle(p.x, p.y, 2.2, color);
        svg.line(W - R + 8, legend_y - 3, W - R + 28, legend_y - 3, color, 2);
        svg.text(W - R + 32, legend_y, variant, 10);
        legend_y += 14;
    }
    svg.save(path);
}

void write_trace_svg(const std::filesystem::path& path, const Scene& scene,
                     const RefinementTrace& trace) {
    const double W = 400;
    auto sx = [&](double x) { return (x + 0.3) / 1.6 * W; };
    auto sy = [&](double y) { return (y + 0.3) / 1.6 * W; };

    SvgWriter svg(W, W);
    svg.rect(sx(0.5), sy(0.5), W / 1.6, W / 1.6, "#f5f4ef");
    for (const auto& obj : scene.objects) {
        const std::string fill = rgb_hex(object_color(obj.kind, obj.variant));
        if (obj.kind == ObjectKind::Cutlery)
            svg.rect(sx(obj.center.x), sy(obj.center.y), 2 * obj.radius / 1.6 * W,
                     2 * obj.radius / kCutleryAspect / 1.6 * W, fill,
                     obj.angle * 180.0 / 3.14159265358979323846);
        else
            svg.circle(sx(obj.center.x), sy(obj.center.y), obj.radius / 1.6 * W, fill);
    }
    svg.circle(sx(kPathStart.x), sy(kPathStart.y), 4, "#2e7d32");
    svg.circle(sx(kPathEnd.x), sy(kPathEnd.y), 4, "#c62828");

    const size_t n = trace.thetas.size();
    for (size_t s = 0; s < n; ++s) {
        const double t = n > 1 ? static_cast<double>(s) / (n - 1) : 1.0;
        const int r = static_cast<int>(21 + t * (150 - 21));
        const int g = static_cast<int>(48 + t * (200 - 48));
        const int b = static_cast<int>(120 + t * (255 - 120));
        char color[16];
        std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, b);
        std::vector<Vec2> pts;
        for (int j = 0; j <= 60; ++j) {
            const Vec2 p = bezier_point(trace.thetas[s], j / 60.0);
            pts.push_back({sx(p.x), sy(p.y)});
        }
        svg.polyline(pts, color, s + 1 == n ? 2.5 : 1.2, s + 1 == n ? 1.0 : 0.8);
    }
    svg.save(path);
}

void write_trace_json(const std::filesystem::path& path, const std::string& scene_path,
                      UserType type, const RefinementTrace& trace) {
    json thetas = json::array(), scores = json::array();
    for (const auto& t : trace.thetas) thetas.push_back({t.x, t.y});
    for (double s : trace.scores) scores.push_back(s);
    const json j{{"scene_path", scene_path},
                 {"user_type", to_string(type)},
                 {"thetas", std::move(thetas)},
                 {"scores", std::move(scores)},
                 {"success", trace.final_valid_oracle}};
    auto os = open_out(path);
    os << j.dump(1) << '\n';
}

struct ReportCheck {
    std::string name;
    std::string status;  // "PASS", "FAIL", "not run"
    std::string detail;
};

}  // namespace

void run_parallel(std::vector<std::function<void()>> jobs, int n_threads) {
    if (jobs.empty()) return;
    const int n = std::clamp<int>(n_threads, 1, static_cast<int>(jobs.size()));
    if (n == 1) {
        for (auto& job : jobs) job();
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                jobs[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::filesystem::path checkpoint_stem(const std::filesystem::path& ckpt_dir,
                                      const std::string& ablation, uint64_t seed, UserType type) {
    return ckpt_dir / ablation / ("seed_" + std::to_string(seed)) / to_string(type);
}

double eval_accuracy(const SpecModel& model, const Dataset& data) {
    const auto images = render_all(data.train_scenes);
    const auto [correct, total] = eval_counts(model, data, images);
    return total ? static_cast<double>(correct) / total : 0.0;
}

int cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    generate_dataset(cfg, out_dir);
    return 0;
}

int cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
              const std::filesystem::path& ckpt_dir) {
    const Dataset data = load_dataset(data_dir);

    // shared, read-only training sets per user type (full demo complement)
    std::array<std::vector<TrainScene>, 3> train_sets;
    for (UserType type : kAllUserTypes)
        train_sets[static_cast<size_t>(type)] = build_train_scenes(data, type, -1, 0);

    std::vector<std::function<void()>> jobs;
    for (const auto& ablation : cfg.ablations)
        for (uint64_t seed : cfg.seeds)
            for (UserType type : kAllUserTypes) {
                jobs.push_back([&, ablation, seed, type] {
                    const auto stem = checkpoint_stem(ckpt_dir, ablation, seed, type);
                    ensure_dir(stem.parent_path());
                    const uint64_t job_seed = train_job_seed(seed, ablation, type);

                    int start_epoch = 0;
                    SpecModel model(type, cfg.weights_for(ablation), job_seed);
                    nn::AdamState opt(model.params());
                    std::filesystem::path opt_path = stem;
                    opt_path += ".optim";
                    std::filesystem::path sidecar = stem;
                    sidecar += ".json";
                    if (std::filesystem::exists(sidecar)) {
                        start_epoch = SpecModel::checkpoint_epoch(stem);
                        if (start_epoch >= cfg.epochs) return;  // already complete
                        model = SpecModel::load_checkpoint(stem);
                        opt = nn::AdamState::load(opt_path, model.params());
                    }

                    TrainConfig tc;
                    tc.epochs = cfg.epochs;
                    tc.batch_size = cfg.batch_size;
                    tc.lr = cfg.lr;
                    tc.seed = job_seed;
                    const TrainLog log =
                        model.train(train_sets[static_cast<size_t>(type)], tc, &opt, start_epoch);

                    model.save_checkpoint(stem, cfg.epochs, job_seed);
                    opt.save(opt_path);

                    std::filesystem::path log_path = stem;
                    log_path += "_log.csv";
                    std::ofstream os(log_path, start_epoch == 0 ? std::ios::trunc : std::ios::app);
                    if (!os) throw IoError("cannot write " + log_path.string());
                    if (start_epoch == 0) os << "epoch,recon,kl,cls,total,accuracy\n";
                    for (const auto& e : log)
                        os << e.epoch << ',' << fmt(e.loss.recon) << ',' << fmt(e.loss.kl) << ','
                           << fmt(e.loss.cls) << ',' << fmt(e.loss.total) << ','
                           << fmt(e.accuracy) << '\n';
                });
            }
    run_parallel(std::move(jobs), cfg.effective_jobs());
    return 0;
}

std::vector<EvalRow> run_eval_sweep(const ExperimentConfig& cfg, const Dataset& data) {
    std::vector<std::string> variants = cfg.ablations;
    if (cfg.eval_irl) variants.push_back("irl");
    const auto images = render_all(data.train_scenes);

    std::vector<EvalRow> rows;
    for (int k : cfg.trajectories_per_scene)
        for (const auto& variant : variants)
            for (uint64_t seed : cfg.seeds) rows.push_back({k, variant, seed, 0.0});

    std::vector<std::function<void()>> jobs;
    for (size_t i = 0; i < rows.size(); ++i) {
        jobs.push_back([&, i] {
            EvalRow& row = rows[i];
            // the k-demo subsample is shared by every variant for a given seed
            const uint64_t subsample_seed = derive_seed(row.seed, {0x57ULL, static_cast<uint64_t>(row.k)});
            int correct = 0, total = 0;
            for (UserType type : kAllUserTypes) {
                const auto scenes = build_train_scenes(data, type, row.k, subsample_seed);
                const uint64_t job_seed =
                    derive_seed(row.seed, {0xE7A1ULL, hash_string(row.variant),
                                           static_cast<uint64_t>(row.k), static_cast<uint64_t>(type)});
                std::pair<int, int> counts;
                if (row.variant == "irl") {
                    RewardModel model(type);
                    IrlConfig icfg;
                    icfg.epochs = cfg.irl_epochs;
                    icfg.lr = cfg.irl_lr;
                    icfg.seed = job_seed;
                    train_irl(model, scenes, icfg);
                    counts = eval_counts_irl(model, data, images);
                } else {
                    SpecModel model(type, cfg.weights_for(row.variant), job_seed);
                    TrainConfig tc;
                    tc.epochs = cfg.eval_epochs;
                    tc.batch_size = cfg.batch_size;
                    tc.lr = cfg.lr;
                    tc.seed = job_seed;
                    model.train(scenes, tc);
                    counts = eval_counts(model, data, images);
                }
                correct += counts.first;
                total += counts.second;
            }
            row.accuracy = total ? static_cast<double>(correct) / total : 0.0;
        });
    }
    run_parallel(std::move(jobs), cfg.effective_jobs());
    return rows;
}

std::vector<EvalAggregate> aggregate_eval(const ExperimentConfig& cfg,
                                          const std::vector<EvalRow>& rows) {
    std::vector<std::string> variants = cfg.ablations;
    if (cfg.eval_irl) variants.push_back("irl");
    std::vector<EvalAggregate> aggs;
    for (int k : cfg.trajectories_per_scene)
        for (const auto& variant : variants) {
            std::vector<double> accs;
            for (const auto& r : rows)
                if (r.k == k && r.variant == variant) accs.push_back(r.accuracy);
            if (accs.empty()) continue;
            aggs.push_back({k, variant, mean_of(accs), quantile(accs, 0.25), quantile(accs, 0.75)});
        }
    return aggs;
}

int cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
             const std::filesystem::path& out_dir) {
    const Dataset data = load_dataset(data_dir);
    ensure_dir(out_dir);
    const auto rows = run_eval_sweep(cfg, data);
    const auto aggs = aggregate_eval(cfg, rows);

    {
        auto os = open_out(out_dir / "accuracy_runs.csv");
        os << "k,variant,seed,accuracy\n";
        for (const auto& r : rows)
            os << r.k << ',' << r.variant << ',' << r.seed << ',' << fmt(r.accuracy, "%.6f")
               << '\n';
    }
    {
        auto os = open_out(out_dir / "accuracy_curve.csv");
        os << "k,variant,mean,q1,q3\n";
        for (const auto& a : aggs)
            os << a.k << ',' << a.variant << ',' << fmt(a.mean, "%.6f") << ',' << fmt(a.q1, "%.6f")
               << ',' << fmt(a.q3, "%.6f") << '\n';
    }
    write_accuracy_svg(cfg, aggs, out_dir / "accuracy_curve.svg");
    return 0;
}

int cmd_refine(const ExperimentConfig& cfg, const std::filesystem::path& ckpt_dir,
               const std::filesystem::path& data_dir, const std::filesystem::path& out_dir) {
    const Dataset data = load_dataset(data_dir);
    ensure_dir(out_dir / "traces");
    const uint64_t seed0 = cfg.seeds.front();
    const uint64_t refine_seed = derive_seed(cfg.data_seed, {0x2EF1ULL});

    auto os = open_out(out_dir / "refine_success.csv");
    os << "user_type,trials,successes,success_rate\n";
    for (UserType type : kAllUserTypes) {
        const SpecModel model =
            SpecModel::load_checkpoint(checkpoint_stem(ckpt_dir, "full", seed0, type));
        std::vector<RefineTraceRecord> traces;
        const RefineStats stats =
            evaluate_refinement(model, data.test_scenes, cfg.refine_trials_per_scene, refine_seed,
                                cfg.refine_max_steps, cfg.refine_step_size, &traces);
        os << to_string(type) << ',' << stats.trials << ',' << stats.successes << ','
           << fmt(stats.success_rate, "%.6f") << '\n';

        int emitted = 0;
        for (const auto& rec : traces) {
            if (rec.trial != 0 || emitted >= cfg.refine_trace_scenes) continue;
            char name[64];
            std::snprintf(name, sizeof name, "%s_scene%03d_trial%d", to_string(type),
                          rec.scene_index, rec.trial);
            char scene_rel[48];
            std::snprintf(scene_rel, sizeof scene_rel, "scenes/test/scene_%03d", rec.scene_index);
            write_trace_json(out_dir / "traces" / (std::string(name) + ".json"), scene_rel, type,
                             rec.trace);
            write_trace_svg(out_dir / "traces" / (std::string(name) + ".svg"),
                            data.test_scenes[static_cast<size_t>(rec.scene_index)], rec.trace);
            ++emitted;
        }
    }
    return 0;
}

int cmd_causal(const ExperimentConfig& cfg, const std::filesystem::path& ckpt_dir,
               const std::filesystem::path& data_dir, const std::filesystem::path& out_dir) {
    const Dataset data = load_dataset(data_dir);
    ensure_dir(out_dir);
    const uint64_t seed0 = cfg.seeds.front();

    std::vector<SpecModel> models;
    models.reserve(3);
    for (UserType type : kAllUserTypes)
        models.push_back(SpecModel::load_checkpoint(checkpoint_stem(ckpt_dir, "full", seed0, type)));
    const ModelSet set{&models[0], &models[1], &models[2]};

    CausalConfig cc;
    cc.thetas_per_scene = cfg.causal_thetas_per_scene;
    cc.bootstrap_samples = cfg.bootstrap_samples;
    cc.seed = cfg.causal_seed;
    cc.augment_seed = derive_seed(cfg.causal_seed, {0xA06ULL});
    cc.effect_floor = cfg.effect_floor;

    const CausalReport report = causal_table(set, data.test_scenes, cc);
    write_causal_csv(report, out_dir / "causal_report.csv");
    open_out(out_dir / "causal_table.txt") << render_causal_table(report);

    // latent-space sampling grids over the first test scene (one per type)
    if (!data.test_scenes.empty()) {
        const nn::Tensor image = image_to_tensor(render_scene(data.test_scenes.front()));
        for (UserType type : kAllUserTypes) {
            const auto grid = model_for(set, type).latent_grid_sample(image, cfg.latent_grid_n);
            auto os = open_out(out_dir /
                               (std::string("latent_grid_") + to_string(type) + ".csv"));
            for (int r = 0; r < cfg.latent_grid_n; ++r) {
                for (int c = 0; c < cfg.latent_grid_n; ++c)
                    os << (c ? "," : "")
                       << fmt(grid[static_cast<size_t>(r) * cfg.latent_grid_n + c], "%.6f");
                os << '\n';
            }
        }
    }
    return direction_structure_ok(report) ? 0 : 3;
}

int cmd_report(const std::filesystem::path& root) {
    // collect known artifacts anywhere under root (first hit in sorted order)
    std::map<std::string, std::filesystem::path> found;
    std::vector<std::filesystem::path> all;
    if (std::filesystem::exists(root))
        for (const auto& e : std::filesystem::recursive_directory_iterator(root))
            if (e.is_regular_file()) all.push_back(e.path());
    std::sort(all.begin(), all.end());
    for (const auto& p : all)
        if (!found.count(p.filename().string())) found[p.filename().string()] = p;

    std::vector<ReportCheck> checks;
    auto not_run = [&](const std::string& name, const std::string& why) {
        checks.push_back({name, "not run", why});
    };

    // accuracy-trend criteria from the eval sweep
    if (found.count("accuracy_curve.csv")) {
        const auto rows = read_csv(found["accuracy_curve.csv"]);
        std::map<std::pair<int, std::string>, double> mean;
        for (size_t i = 1; i < rows.size(); ++i)
            if (rows[i].size() >= 3)
                mean[{std::stoi(rows[i][0]), rows[i][1]}] = std::stod(rows[i][2]);
        auto have = [&](int k, const std::string& v) { return mean.count({k, v}) > 0; };
        if (have(9, "full") && have(1, "full")) {
            const double f9 = mean[{9, "full"}], f1 = mean[{1, "full"}];
            bool ok = f9 >= 0.90 && f1 <= f9 - 0.10;
            std::string detail = "full@9=" + fmt(f9, "%.3f") + ", full@1=" + fmt(f1, "%.3f");
            if (have(1, "irl")) {
                ok = ok && mean[{1, "irl"}] < f1;
                detail += ", irl@1=" + fmt(mean[{1, "irl"}], "%.3f");
            }
            for (int k : {1, 2, 3})
                if (have(k, "full") && have(k, "classifier"))
                    ok = ok && mean[{k, "full"}] >= mean[{k, "classifier"}];
            checks.push_back({"accuracy trend (Fig. 6)", ok ? "PASS" : "FAIL", detail});
        } else {
            not_run("accuracy trend (Fig. 6)", "k=1/k=9 rows missing");
        }
    } else {
        not_run("accuracy trend (Fig. 6)", "accuracy_curve.csv not found");
    }

    if (found.count("refine_success.csv")) {
        const auto rows = read_csv(found["refine_success.csv"]);
        std::map<std::string, double> rate;
        for (size_t i = 1; i < rows.size(); ++i)
            if (rows[i].size() >= 4) rate[rows[i][0]] = std::stod(rows[i][3]);
        if (rate.count("careful") && rate.count("normal") && rate.count("aggressive")) {
            const bool ok =
                rate["aggressive"] == 1.0 && rate["normal"] >= 0.85 && rate["careful"] >= 0.60;
            checks.push_back({"refinement success (Table 1)", ok ? "PASS" : "FAIL",
                              "careful=" + fmt(rate["careful"], "%.2f") +
                                  ", normal=" + fmt(rate["normal"], "%.2f") +
                                  ", aggressive=" + fmt(rate["aggressive"], "%.2f")});
        } else {
            not_run("refinement success (Table 1)", "rows missing");
        }
    } else {
        not_run("refinement success (Table 1)", "refine_success.csv not found");
    }

    if (found.count("causal_report.csv")) {
        const auto rows = read_csv(found["causal_report.csv"]);
        // user_type,intervention,mean,ci_low,ci_high,delta,significant
        std::map<std::pair<std::string, std::string>, std::vector<std::string>> cells;
        for (size_t i = 1; i < rows.size(); ++i)
            if (rows[i].size() >= 7) cells[{rows[i][0], rows[i][1]}] = rows[i];
        bool ok = true, complete = true;
        for (const char* type : {"careful", "normal", "aggressive"})
            for (const char* kind : {"add_bowl", "add_plate", "add_cutlery", "add_glass"}) {
                auto it = cells.find({type, kind});
                if (it == cells.end()) {
                    complete = false;
                    continue;
                }
                const bool sig = it->second[6] == "true";
                const double delta = std::stod(it->second[5]);
                const bool expect = std::string(type) == "careful" ||
                                    (std::string(type) == "normal" && std::string(kind) == "add_glass");
                ok = ok && sig == expect && (!expect || delta < 0);
            }
        // aggressive row stays saturated
        for (const char* label : {"none", "add_bowl", "add_plate", "add_cutlery", "add_glass"}) {
            auto it = cells.find({"aggressive", label});
            if (it != cells.end()) ok = ok && std::stod(it->second[2]) >= 0.99;
        }
        // user-type ordering with careful/aggressive CI separation
        auto base_c = cells.find({"careful", "none"});
        auto base_n = cells.find({"normal", "none"});
        auto base_a = cells.find({"aggressive", "none"});
        bool ordering_ok = true;
        if (base_c != cells.end() && base_n != cells.end() && base_a != cells.end()) {
            const double mc = std::stod(base_c->second[2]), mn = std::stod(base_n->second[2]),
                         ma = std::stod(base_a->second[2]);
            ordering_ok = mc < mn && mn < ma &&
                          std::stod(base_c->second[4]) < std::stod(base_a->second[3]);
        } else {
            complete = false;
        }
        if (complete) {
            checks.push_back({"causal direction structure (Table 2)", ok ? "PASS" : "FAIL", ""});
            checks.push_back({"user-type intervention ordering (Eq. 2)",
                              ordering_ok ? "PASS" : "FAIL", ""});
        } else {
            not_run("causal direction structure (Table 2)", "rows missing");
            not_run("user-type intervention ordering (Eq. 2)", "rows missing");
        }
    } else {
        not_run("causal direction structure (Table 2)", "causal_report.csv not found");
        not_run("user-type intervention ordering (Eq. 2)", "causal_report.csv not found");
    }

    if (found.count("acceptance_results.json")) {
        std::ifstream is(found["acceptance_results.json"]);
        json j = json::parse(is, nullptr, false);
        if (!j.is_discarded() && j.contains("criteria"))
            for (const auto& c : j.at("criteria"))
                checks.push_back({"acceptance criterion " + std::to_string(c.value("id", 0)),
                                  c.value("pass", false) ? "PASS" : "FAIL",
                                  c.value("detail", std::string())});
    } else {
        not_run("test-suite criteria (gradients, oracles, determinism, null controls)",
                "acceptance_results.json not found; run the acceptance suite");
    }

    auto os = open_out(root / "report.md");
    os << "# Reproduction report\n\n| check | status | detail |\n|---|---|---|\n";
    for (const auto& c : checks)
        os << "| " << c.name << " | " << c.status << " | " << c.detail << " |\n";
    os << "\nArtifacts discovered under `" << root.string() << "`:\n";
    for (const auto& [name, p] : found) os << "- `" << p.string() << "`\n";
    return 0;
}

}  // namespace speclearn

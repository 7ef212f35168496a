#include "sccs/cli_io.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "sccs/media_segment.hpp"
#include "sccs/metrics.hpp"
#include "sccs/ot_align.hpp"
#include "sccs/summarize.hpp"
#include "sccs/text_segment.hpp"

namespace sccs::cli {

namespace {

using json = nlohmann::ordered_json;

struct EffectiveConfig {
  ot::SolverConfig solver;
  media::VtsConfig vts;
  double cut_threshold = 0.5;
  double threshold_multiplier = 0.5;
  std::size_t keyframes_k = 1;
  std::size_t sentences_k = 1;
  std::uint64_t seed = 0;
};

void apply(EffectiveConfig& cfg, const ConfigOverrides& o) {
  if (o.lambda) cfg.solver.lambda = *o.lambda;
  if (o.beta) cfg.solver.beta = *o.beta;
  if (o.outer_iters) cfg.solver.outer_iters = *o.outer_iters;
  if (o.inner_iters) cfg.solver.inner_iters = *o.inner_iters;
  if (o.tol) cfg.solver.tol = *o.tol;
  if (o.tau) cfg.vts.tau = *o.tau;
  if (o.omega_b) cfg.vts.omega_b = *o.omega_b;
  if (o.smooth_window) cfg.vts.smooth_window = *o.smooth_window;
  if (o.cut_threshold) cfg.cut_threshold = *o.cut_threshold;
  if (o.threshold_multiplier) cfg.threshold_multiplier = *o.threshold_multiplier;
  if (o.keyframes_k) cfg.keyframes_k = *o.keyframes_k;
  if (o.sentences_k) cfg.sentences_k = *o.sentences_k;
  if (o.seed) cfg.seed = *o.seed;
}

json ranges_json(const SegmentPartition& p) {
  json out = json::array();
  for (const auto& r : p.ranges) out.push_back({r.start, r.end});
  return out;
}

const char* mode_name(ot::SinkhornMode m) {
  switch (m) {
    case ot::SinkhornMode::Auto: return "auto";
    case ot::SinkhornMode::Kernel: return "kernel";
    case ot::SinkhornMode::LogDomain: return "log";
  }
  return "auto";
}

void emit(const json& j, const std::optional<std::string>& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path) {
    write_file_bytes(*path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } else {
    out << text;
  }
}

std::string read_whole(const std::string& path) { return read_text_file(path); }

// --- segment-video --------------------------------------------------------

struct VideoArgs {
  std::string frames;
  std::optional<std::string> out;
  ConfigOverrides flags;
};

json run_segment_video(const VideoArgs& a) {
  EffectiveConfig cfg;
  apply(cfg, a.flags);
  media::validate_config(cfg.vts);
  const auto frames = read_embeddings(a.frames);
  const auto shots = media::detect_shots(frames, cfg.cut_threshold);
  const auto scenes = media::segment_scenes(shots, cfg.vts);
  const auto scores = media::smoothed_boundary_scores(shots, cfg.vts);

  json j;
  j["config"] = {{"cut_threshold", cfg.cut_threshold},
                 {"omega_b", cfg.vts.omega_b},
                 {"tau", cfg.vts.tau},
                 {"smooth_window", cfg.vts.smooth_window},
                 {"diff_weight", cfg.vts.diff_weight},
                 {"rel_weight", cfg.vts.rel_weight}};
  j["frames"] = frames.rows();
  j["shots"] = ranges_json(shots.shots);
  j["boundary_scores"] = scores;
  j["scene_shot_ranges"] = ranges_json(scenes);
  j["segments"] = ranges_json(media::scenes_to_frames(shots, scenes));
  return j;
}

// --- segment-text ---------------------------------------------------------

struct TextArgs {
  std::string sentences;
  std::string embeddings;
  std::optional<std::string> out;
  ConfigOverrides flags;
};

json run_segment_text(const TextArgs& a) {
  EffectiveConfig cfg;
  apply(cfg, a.flags);
  const text::SentenceSet s(read_sentence_lines(a.sentences), read_embeddings(a.embeddings));
  const auto partition = text::segment_text(s, cfg.threshold_multiplier);
  json j;
  j["config"] = {{"threshold_multiplier", cfg.threshold_multiplier}};
  j["sentences"] = s.size();
  j["depth_scores"] = s.size() >= 2 ? text::depth_scores(s) : std::vector<double>{};
  j["segments"] = ranges_json(partition);
  return j;
}

// --- align ----------------------------------------------------------------

struct AlignArgs {
  std::string manifest;
  std::string solver = "sinkhorn";
  std::string mode = "global";
  std::string sinkhorn_mode = "auto";
  std::optional<std::size_t> max_iters;
  std::size_t workers = 1;
  std::optional<std::string> out;
  std::optional<std::string> plan_out;
  bool timings = false;
  ConfigOverrides flags;
};

struct Candidates {
  std::vector<std::vector<std::size_t>> keyframes;  // per video segment, global frame indices
  std::vector<std::vector<std::size_t>> sentences;  // per text segment, global sentence indices
};

std::vector<std::vector<std::size_t>> keyframe_candidates(const EmbeddingMatrix& frames,
                                                          const std::optional<std::vector<FrameBuffer>>& raw,
                                                          const SegmentPartition& segments, const EffectiveConfig& cfg) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& seg : segments.ranges) {
    const std::size_t k = std::min(cfg.keyframes_k, seg.size());
    std::vector<std::size_t> local;
    if (raw) {
      const std::vector<FrameBuffer> subset(raw->begin() + seg.start, raw->begin() + seg.end);
      local = summarize::select_keyframes_unsupervised(subset, k, cfg.seed);
    } else {
      Matrix identity(frames.dims(), frames.dims());
      for (std::size_t d = 0; d < frames.dims(); ++d) identity(d, d) = 1.0;
      local = summarize::select_keyframes_attention(frames.slice(seg.start, seg.end), {identity, {}}, k);
      std::sort(local.begin(), local.end());
    }
    for (auto& i : local) i += seg.start;
    out.push_back(std::move(local));
  }
  return out;
}

json run_align(const AlignArgs& a) {
  using clock = std::chrono::steady_clock;
  json timings;
  auto mark = clock::now();
  auto lap = [&](const char* name) {
    const auto now = clock::now();
    timings[name] = std::chrono::duration<double, std::milli>(now - mark).count();
    mark = now;
  };

  const Manifest manifest = read_manifest(a.manifest);
  EffectiveConfig cfg;
  apply(cfg, manifest.config);
  apply(cfg, a.flags);
  if (a.max_iters) cfg.solver.max_iters = *a.max_iters;
  if (a.sinkhorn_mode == "kernel") cfg.solver.sinkhorn_mode = ot::SinkhornMode::Kernel;
  else if (a.sinkhorn_mode == "log") cfg.solver.sinkhorn_mode = ot::SinkhornMode::LogDomain;
  if (cfg.keyframes_k == 0 || cfg.sentences_k == 0) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  ot::validate_config(cfg.solver);
  media::validate_config(cfg.vts);
  const auto solver = a.solver == "alg1" ? ot::Solver::Algorithm1 : ot::Solver::Sinkhorn;

  auto texts = read_sentence_lines(manifest.sentence_texts_path);
  if (texts.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no sentences in " + manifest.sentence_texts_path.string());
  const auto frames = read_embeddings(manifest.frame_embeddings_path);
  const text::SentenceSet sentences(std::move(texts), read_embeddings(manifest.sentence_embeddings_path));
  if (frames.dims() != sentences.embeddings.dims()) {
    throw Error(ErrorCode::DimMismatch, "frame embeddings have " + std::to_string(frames.dims()) +
                                            " dims, sentence embeddings " +
                                            std::to_string(sentences.embeddings.dims()));
  }
  std::optional<std::vector<FrameBuffer>> raw;
  if (manifest.raw_frames_path) {
    raw = read_pgm_frames(*manifest.raw_frames_path);
    if (raw->size() != frames.rows()) {
      throw Error(ErrorCode::RowCountMismatch, std::to_string(raw->size()) + " raw frames vs " +
                                                   std::to_string(frames.rows()) + " frame embeddings");
    }
  }
  lap("load");

  const auto shots = media::detect_shots(frames, cfg.cut_threshold);
  const auto video_segments = media::scenes_to_frames(shots, media::segment_scenes(shots, cfg.vts));
  const auto text_segments = text::segment_text(sentences, cfg.threshold_multiplier);
  lap("segment");

  Candidates cand;
  cand.keyframes = keyframe_candidates(frames, raw, video_segments, cfg);
  cand.sentences = summarize::select_sentences_centroid(sentences, text_segments, cfg.sentences_k, cfg.seed);
  lap("candidates");

  std::vector<CandidatePair> pairs;
  for (std::size_t v = 0; v < cand.keyframes.size(); ++v) {
    for (std::size_t t = 0; t < cand.sentences.size(); ++t) {
      pairs.push_back({frames.select(cand.keyframes[v]), sentences.embeddings.select(cand.sentences[t]), v, t, {}});
    }
  }
  const auto best = ot::select_best_pair(pairs, solver, cfg.solver, a.workers);
  lap("align");

  const std::size_t nv = cand.keyframes.size(), nt = cand.sentences.size();
  json table = json::array();
  for (std::size_t v = 0; v < nv; ++v) {
    json row = json::array();
    for (std::size_t t = 0; t < nt; ++t) row.push_back(*pairs[v * nt + t].distance);
    table.push_back(row);
  }

  auto describe = [&](const CandidatePair& p) {
    std::vector<std::string> chosen_texts;
    for (std::size_t i : cand.sentences[p.textual_segment_id]) chosen_texts.push_back(sentences.texts[i]);
    return json{{"visual_segment", p.visual_segment_id},
                {"keyframes", cand.keyframes[p.visual_segment_id]},
                {"textual_segment", p.textual_segment_id},
                {"sentences", cand.sentences[p.textual_segment_id]},
                {"texts", chosen_texts},
                {"distance", *p.distance}};
  };

  json selected = json::array();
  bool consistent = true;
  if (a.mode == "per-segment") {
    for (std::size_t t = 0; t < nt; ++t) {
      std::vector<CandidatePair> column;
      for (std::size_t v = 0; v < nv; ++v) column.push_back(pairs[v * nt + t]);
      const auto& pick = column[ot::argmin_pair(column)];
      for (const auto& c : column) consistent = consistent && *pick.distance <= *c.distance;
      selected.push_back(describe(pick));
    }
  } else {
    for (const auto& p : pairs) consistent = consistent && *best.distance <= *p.distance;
    selected.push_back(describe(best));
  }

  const auto plan = ot::solve_pair(best, solver, cfg.solver);
  if (a.plan_out) export_plan_heatmap(plan.plan, *a.plan_out);
  lap("report");

  json j;
  j["config"] = {{"solver", a.solver},
                 {"mode", a.mode},
                 {"lambda", cfg.solver.lambda},
                 {"beta", cfg.solver.beta},
                 {"outer_iters", cfg.solver.outer_iters},
                 {"inner_iters", cfg.solver.inner_iters},
                 {"tol", cfg.solver.tol},
                 {"max_iters", cfg.solver.max_iters},
                 {"sinkhorn_mode", mode_name(cfg.solver.sinkhorn_mode)},
                 {"cut_threshold", cfg.cut_threshold},
                 {"omega_b", cfg.vts.omega_b},
                 {"tau", cfg.vts.tau},
                 {"smooth_window", cfg.vts.smooth_window},
                 {"threshold_multiplier", cfg.threshold_multiplier},
                 {"keyframes_k", cfg.keyframes_k},
                 {"sentences_k", cfg.sentences_k},
                 {"seed", cfg.seed},
                 {"keyframe_selector", std::string(raw ? "histogram-kmeans" : "attention")}};
  j["video"] = {{"frames", frames.rows()}, {"shots", ranges_json(shots.shots)}, {"segments", ranges_json(video_segments)}};
  j["text"] = {{"sentences", sentences.size()}, {"segments", ranges_json(text_segments)}};
  j["visual_candidates"] = cand.keyframes;
  j["textual_candidates"] = cand.sentences;
  j["distances"] = table;
  j["selected"] = selected;
  j["best_plan"] = {{"visual_segment", best.visual_segment_id},
                    {"textual_segment", best.textual_segment_id},
                    {"rows", plan.plan.rows()},
                    {"cols", plan.plan.cols()},
                    {"iterations", plan.iterations_used},
                    {"marginal_violation", plan.marginal_violation},
                    {"converged", plan.converged},
                    {"log_domain", plan.log_domain}};
  j["self_check"] = {{"selected_is_minimum", consistent}};
  if (a.timings) j["timings_ms"] = timings;
  if (!consistent) throw std::logic_error("selected pair is not the minimum of the distance table");
  return j;
}

// --- evaluate -------------------------------------------------------------

json rouge_json(const metrics::RougeScore& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

json run_rouge(const std::vector<std::string>& cands, const std::vector<std::string>& refs) {
  if (cands.size() != refs.size() || cands.empty()) {
    throw Error(ErrorCode::RowCountMismatch, std::to_string(cands.size()) + " candidate files vs " +
                                                 std::to_string(refs.size()) + " reference files");
  }
  json pairs = json::array();
  double f[3] = {0, 0, 0};
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto c = read_whole(cands[i]);
    const auto r = read_whole(refs[i]);
    const auto r1 = metrics::rouge_n(c, r, 1), r2 = metrics::rouge_n(c, r, 2), rl = metrics::rouge_l(c, r);
    f[0] += r1.f1;
    f[1] += r2.f1;
    f[2] += rl.f1;
    pairs.push_back({{"candidate", cands[i]},
                     {"reference", refs[i]},
                     {"rouge1", rouge_json(r1)},
                     {"rouge2", rouge_json(r2)},
                     {"rougeL", rouge_json(rl)}});
  }
  const double n = static_cast<double>(cands.size());
  return {{"metric", "rouge"},
          {"rouge1_f1", f[0] / n},
          {"rouge2_f1", f[1] / n},
          {"rougeL_f1", f[2] / n},
          {"pairs", pairs}};
}

std::vector<metrics::RankedCandidates> read_rankings(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_whole(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ManifestInvalid, path + ": " + e.what());
  }
  if (doc.is_object()) doc = json::array({doc});
  if (!doc.is_array() || doc.empty()) throw Error(ErrorCode::ManifestInvalid, path + ": expected ranking object(s)");
  std::vector<metrics::RankedCandidates> out;
  for (std::size_t q = 0; q < doc.size(); ++q) {
    const auto& item = doc[q];
    const std::string where = path + " ranking " + std::to_string(q);
    if (!item.is_object() || !item.contains("scores") || !item["scores"].is_array()) {
      throw Error(ErrorCode::ManifestInvalid, where + ": \"scores\" must be an array of numbers");
    }
    if (!item.contains("positives") || !item["positives"].is_array()) {
      throw Error(ErrorCode::ManifestInvalid, where + ": \"positives\" must be an array of ids");
    }
    metrics::RankedCandidates r;
    for (const auto& s : item["scores"]) {
      if (!s.is_number()) throw Error(ErrorCode::ManifestInvalid, where + ": non-numeric score");
      r.scores.push_back(s.get<double>());
    }
    for (const auto& p : item["positives"]) {
      if (!p.is_number_unsigned()) throw Error(ErrorCode::ManifestInvalid, where + ": positive ids must be >= 0 integers");
      r.positives.push_back(p.get<std::size_t>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

json run_map(const std::string& path) {
  const auto queries = read_rankings(path);
  std::vector<double> ap;
  for (const auto& q : queries) ap.push_back(metrics::average_precision(q));
  return {{"metric", "map"}, {"queries", queries.size()}, {"map", metrics::mean_average_precision(queries)},
          {"average_precision", ap}};
}

json run_recall(const std::string& path, std::size_t k, std::optional<std::size_t> n) {
  const auto queries = read_rankings(path);
  std::vector<double> per;
  double sum = 0.0;
  for (const auto& q : queries) {
    per.push_back(metrics::recall_at_k(q, n.value_or(q.scores.size()), k));
    sum += per.back();
  }
  return {{"metric", "recall"}, {"k", k}, {"queries", queries.size()},
          {"recall_at_k", sum / static_cast<double>(queries.size())}, {"per_query", per}};
}

json run_cos(const std::string& a_path, const std::string& b_path) {
  const auto a = read_embeddings(a_path);
  const auto b = read_embeddings(b_path);
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::RowCountMismatch, std::to_string(a.rows()) + " rows vs " + std::to_string(b.rows()));
  }
  std::vector<double> per;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const std::vector<double> x(a.row(i).begin(), a.row(i).end()), y(b.row(i).begin(), b.row(i).end());
    per.push_back(metrics::cosine_similarity(x, y));
    sum += per.back();
  }
  return {{"metric", "cos"}, {"rows", a.rows()}, {"mean", sum / static_cast<double>(a.rows())}, {"per_row", per}};
}

void add_segmentation_flags(CLI::App* cmd, ConfigOverrides& o) {
  cmd->add_option("--cut-threshold", o.cut_threshold, "Cosine distance above which consecutive frames start a new shot");
  cmd->add_option("--omega-b", o.omega_b, "Shots per side of a boundary window");
  cmd->add_option("--tau", o.tau, "Scene boundary threshold on the smoothed score");
  cmd->add_option("--smooth-window", o.smooth_window, "Odd width of the boundary score smoother");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-domain video/article summarization via optimal transport alignment", "sccs"};
  app.require_subcommand(1);

  VideoArgs video;
  auto* seg_video = app.add_subcommand("segment-video", "Split frame embeddings into shots and scenes");
  seg_video->add_option("--frames", video.frames, "Frame embeddings (SCCSEMB1)")->required();
  seg_video->add_option("--out", video.out, "Write JSON here instead of stdout");
  add_segmentation_flags(seg_video, video.flags);

  TextArgs textargs;
  auto* seg_text = app.add_subcommand("segment-text", "Split a sentence list into topical segments");
  seg_text->add_option("--sentences", textargs.sentences, "One sentence per line")->required();
  seg_text->add_option("--sent-emb", textargs.embeddings, "Sentence embeddings (SCCSEMB1)")->required();
  seg_text->add_option("--threshold-multiplier", textargs.flags.threshold_multiplier,
                       "Cut where depth > mean + multiplier * stddev");
  seg_text->add_option("--out", textargs.out, "Write JSON here instead of stdout");

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Segment, pick candidates and select the best-aligned pair");
  align_cmd->add_option("manifest", align.manifest, "Manifest JSON")->required();
  align_cmd->add_option("--solver", align.solver, "sinkhorn or alg1")
      ->check(CLI::IsMember({"sinkhorn", "alg1"}))
      ->capture_default_str();
  align_cmd->add_option("--mode", align.mode, "global or per-segment")
      ->check(CLI::IsMember({"global", "per-segment"}))
      ->capture_default_str();
  align_cmd->add_option("--lambda", align.flags.lambda, "Entropic weight (sinkhorn)");
  align_cmd->add_option("--beta", align.flags.beta, "Proximal temperature (alg1)");
  align_cmd->add_option("--outer", align.flags.outer_iters, "Outer iterations N (alg1)");
  align_cmd->add_option("--inner", align.flags.inner_iters, "Inner iterations L (alg1)");
  align_cmd->add_option("--tol", align.flags.tol, "Marginal tolerance");
  align_cmd->add_option("--max-iters", align.max_iters, "Sinkhorn iteration cap");
  align_cmd->add_option("--sinkhorn-mode", align.sinkhorn_mode, "auto, kernel or log")
      ->check(CLI::IsMember({"auto", "kernel", "log"}))
      ->capture_default_str();
  align_cmd->add_option("--keyframes-k", align.flags.keyframes_k, "Keyframes per video segment");
  align_cmd->add_option("--sentences-k", align.flags.sentences_k, "Sentences per text segment");
  align_cmd->add_option("--threshold-multiplier", align.flags.threshold_multiplier, "Text segmentation threshold");
  add_segmentation_flags(align_cmd, align.flags);
  align_cmd->add_option("--seed", align.flags.seed, "Seed for k-means initialisation");
  align_cmd->add_option("--workers", align.workers, "Threads for pairwise solves")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  align_cmd->add_option("--out", align.out, "Write the report here instead of stdout");
  align_cmd->add_option("--plan-out", align.plan_out, "Best pair's plan as .pgm heatmap or .csv");
  align_cmd->add_flag("--timings", align.timings, "Include stage timings (makes output non-reproducible)");

  auto* eval = app.add_subcommand("evaluate", "Score summaries and rankings");
  eval->require_subcommand(1);
  std::optional<std::string> eval_out;

  std::vector<std::string> rouge_cands, rouge_refs;
  auto* rouge = eval->add_subcommand("rouge", "ROUGE-1/2/L F1 over candidate/reference file pairs");
  rouge->add_option("--candidate", rouge_cands, "Candidate text file (repeatable)")->required();
  rouge->add_option("--reference", rouge_refs, "Reference text file (repeatable, paired by position)")->required();

  std::string ranking_path;
  auto* map = eval->add_subcommand("map", "Mean average precision over ranking JSON");
  map->add_option("--ranking", ranking_path, "{\"scores\": [...], \"positives\": [...]} or an array of those")
      ->required();

  std::size_t recall_k = 1;
  std::optional<std::size_t> recall_n;
  auto* recall = eval->add_subcommand("recall", "R_n@k over ranking JSON");
  recall->add_option("--ranking", ranking_path, "Ranking JSON")->required();
  recall->add_option("--k", recall_k, "Cutoff position")->required();
  recall->add_option("--n", recall_n, "Expected candidate count (defaults to each ranking's size)");

  std::string cos_a, cos_b;
  auto* cos = eval->add_subcommand("cos", "Mean row-paired cosine similarity of two embedding files");
  cos->add_option("--a", cos_a, "First embeddings file")->required();
  cos->add_option("--b", cos_b, "Second embeddings file")->required();

  for (auto* sub : {rouge, map, recall, cos}) sub->add_option("--out", eval_out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (seg_video->parsed()) {
      emit(run_segment_video(video), video.out, out);
    } else if (seg_text->parsed()) {
      emit(run_segment_text(textargs), textargs.out, out);
    } else if (align_cmd->parsed()) {
      emit(run_align(align), align.out, out);
    } else if (rouge->parsed()) {
      emit(run_rouge(rouge_cands, rouge_refs), eval_out, out);
    } else if (map->parsed()) {
      emit(run_map(ranking_path), eval_out, out);
    } else if (recall->parsed()) {
      emit(run_recall(ranking_path, recall_k, recall_n), eval_out, out);
    } else if (cos->parsed()) {
      emit(run_cos(cos_a, cos_b), eval_out, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::EmptyCandidateSet ? kExitEmptyResult : kExitInputError;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"sccs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sccs::cli

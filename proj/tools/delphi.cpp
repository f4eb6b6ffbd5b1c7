// delphi: command-line front end for study directories.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "delphi/delphi.hpp"
#include "delphi/http_api.hpp"

namespace fs = std::filesystem;
using namespace delphi;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("malformed document", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) { return parse_json_text(read_file(path)); }

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

struct Common {
    std::string study_dir;
    std::string format = "json";
    std::string actor = "facilitator";
};

void add_common(CLI::App* cmd, Common& c, bool format = true) {
    cmd->add_option("--study", c.study_dir, "Study directory")->required();
    cmd->add_option("--actor", c.actor, "Actor recorded in the audit log");
    if (format) cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "md"}));
}

StudySession open_study(const Common& c) { return StudySession::open(c.study_dir); }

void print_violations(const ValidationReport& report, const std::string& format) {
    if (format == "json") {
        print_json(report);
        return;
    }
    if (format == "csv") {
        std::cout << "code,subject,row,detail\n";
        for (const auto& v : report.violations) {
            std::cout << csv::escape(v.code) << ',' << csv::escape(v.subject) << ','
                      << (v.row ? std::to_string(*v.row) : "") << ',' << csv::escape(v.detail) << '\n';
        }
        return;
    }
    if (report.ok()) std::cout << "No violations.\n";
    for (const auto& v : report.violations) {
        std::cout << "- " << v.code << ": " << v.subject;
        if (v.row) std::cout << " (row " << *v.row << ")";
        if (!v.detail.empty()) std::cout << " " << v.detail;
        std::cout << '\n';
    }
}

void print_classifications(const StudyState& st, const std::string& format) {
    const auto ordered = ordered_classifications(st.study, st.classifications);
    if (format == "csv") {
        std::cout << tiers_csv(ordered);
        return;
    }
    const auto t = tally(ordered);
    if (format == "json") {
        print_json({{"schema_version", kSchemaVersion}, {"classifications", ordered}, {"tally", tally_json(t)}});
        return;
    }
    std::cout << "| Tier | Items | Share |\n|---|---:|---:|\n";
    for (auto tier : kAllTiers) std::cout << "| " << tier_title(tier) << " | " << t.count(tier) << " | " << t.percent(tier) << " |\n";
    std::cout << "\nConsensus rate: " << t.consensus_rate() << " (" << t.consensus() << " of " << t.classified << ")\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Hybrid Delphi study engine"};
    app.require_subcommand(1);

    auto* study = app.add_subcommand("study", "Operate on a study directory");
    study->require_subcommand(1);

    Common c;

    // study new
    std::string from;
    auto* cmd_new = study->add_subcommand("new", "Create a study directory from a study document");
    cmd_new->add_option("--study", c.study_dir, "Study directory")->required();
    cmd_new->add_option("--from", from, "Study document (JSON)")->required();
    cmd_new->add_option("--actor", c.actor);
    cmd_new->callback([&] {
        auto doc = parse_study(read_json(from));
        auto s = StudySession::create(doc, c.actor, system_utc_clock(), fs::path(c.study_dir));
        print_json({{"schema_version", kSchemaVersion}, {"study", s.study().id}, {"state", s.study().round_state}});
    });

    // study validate
    std::string validate_file;
    auto* cmd_validate = study->add_subcommand("validate", "List structural violations");
    cmd_validate->add_option("--study", c.study_dir, "Study directory");
    cmd_validate->add_option("--file", validate_file, "Study document instead of a directory");
    cmd_validate->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv", "md"}));
    cmd_validate->callback([&] {
        if (validate_file.empty() == c.study_dir.empty()) throw CLI::ValidationError("give exactly one of --study or --file");
        const Study s = validate_file.empty() ? open_study(c).study() : parse_study(read_json(validate_file));
        const auto report = validate_study(s);
        print_violations(report, c.format);
        if (!report.ok()) throw CLI::RuntimeError(3);
    });

    // study transition
    std::string event;
    auto* cmd_transition = study->add_subcommand("transition", "Apply a workflow event");
    add_common(cmd_transition, c, false);
    cmd_transition->add_option("--event", event, "Workflow event")->required();
    cmd_transition->callback([&] {
        auto s = open_study(c);
        const auto e = parse_enum<WorkflowEvent>(event);
        if (e == WorkflowEvent::emit_report) {
            s.emit_report(c.actor);
        } else {
            s.transition(e, c.actor);
        }
        s.save_snapshot();
        print_json({{"schema_version", kSchemaVersion}, {"state", s.study().round_state}});
    });

    // study ingest
    std::string ingest_file;
    auto* cmd_ingest = study->add_subcommand("ingest", "Ingest a response document");
    add_common(cmd_ingest, c);
    cmd_ingest->add_option("--file", ingest_file, "Response document (JSON)")->required();
    cmd_ingest->callback([&] {
        auto s = open_study(c);
        const auto out = s.ingest_responses(read_json(ingest_file), c.actor);
        s.save_snapshot();
        if (c.format == "json") {
            print_json({{"schema_version", kSchemaVersion},
                        {"accepted", out.accepted},
                        {"accepted_panelists", out.accepted_panelists},
                        {"rejected_panelists", out.rejected_panelists},
                        {"created_items", out.created_items},
                        {"report", out.report}});
        } else {
            std::cout << "accepted " << out.accepted << " responses\n";
            print_violations(out.report, c.format);
        }
    });

    // study code
    std::string code_file, code_response, code_codes, code_note;
    auto* cmd_code = study->add_subcommand("code", "Record reasoning codes");
    add_common(cmd_code, c, false);
    cmd_code->add_option("--file", code_file, "Coding CSV (response_id,categories,coder,timestamp)");
    cmd_code->add_option("--response", code_response, "Response id (item:panelist)");
    cmd_code->add_option("--codes", code_codes, "Categories separated by ';'");
    cmd_code->add_option("--note", code_note);
    cmd_code->callback([&] {
        auto s = open_study(c);
        std::size_t n = 0;
        if (!code_file.empty()) {
            for (const auto& rec : parse_coding_csv(read_file(code_file))) {
                s.code_response(rec.response_id, rec.codes, rec.coder.empty() ? c.actor : rec.coder);
                ++n;
            }
        } else {
            if (code_response.empty() || code_codes.empty()) throw CLI::ValidationError("need --file or --response with --codes");
            s.code_response(code_response, ReasoningCodeSet::split(code_codes, ';'), c.actor,
                            code_note.empty() ? std::nullopt : std::optional(code_note));
            n = 1;
        }
        s.save_snapshot();
        print_json({{"schema_version", kSchemaVersion}, {"coded", n}});
    });

    // study novelty
    std::string novelty_response;
    bool novelty_clear = false;
    auto* cmd_novelty = study->add_subcommand("novelty", "Flag a response as introducing a new interpretation");
    add_common(cmd_novelty, c, false);
    cmd_novelty->add_option("--response", novelty_response)->required();
    cmd_novelty->add_flag("--clear", novelty_clear);
    cmd_novelty->callback([&] {
        auto s = open_study(c);
        s.flag_novelty(novelty_response, !novelty_clear, c.actor);
        s.save_snapshot();
        print_json({{"schema_version", kSchemaVersion}, {"response_id", novelty_response}, {"novelty_flag", !novelty_clear}});
    });

    // study clarify
    std::string cl_item, cl_panelist, cl_question, cl_answer;
    auto* cmd_clarify = study->add_subcommand("clarify", "Open or answer a clarification exchange");
    add_common(cmd_clarify, c, false);
    cmd_clarify->add_option("--item", cl_item)->required();
    cmd_clarify->add_option("--panelist", cl_panelist)->required();
    auto* q = cmd_clarify->add_option("--question", cl_question);
    auto* a = cmd_clarify->add_option("--answer", cl_answer);
    q->excludes(a);
    cmd_clarify->callback([&] {
        auto s = open_study(c);
        const auto ex = cl_answer.empty() ? s.request_clarification(cl_item, cl_panelist, cl_question, c.actor)
                                          : s.record_answer(cl_item, cl_panelist, cl_answer, c.actor);
        s.save_snapshot();
        print_json({{"schema_version", kSchemaVersion}, {"exchange", ex}});
    });

    // study ai-collect
    std::string ai_panelist, ai_mock, ai_record, ai_replay;
    auto* cmd_ai = study->add_subcommand("ai-collect", "Collect AI respondent answers through an adapter");
    add_common(cmd_ai, c, false);
    cmd_ai->add_option("--panelist", ai_panelist, "AI respondent panelist id")->required();
    auto* mock_opt = cmd_ai->add_option("--mock", ai_mock, "Mock answers (JSON keyed by item id)");
    auto* replay_opt = cmd_ai->add_option("--replay", ai_replay, "Replay transcript (JSONL)");
    cmd_ai->add_option("--record", ai_record, "Append exchanges to a transcript (JSONL)");
    mock_opt->excludes(replay_opt);
    cmd_ai->callback([&] {
        auto s = open_study(c);
        std::unique_ptr<AiAdapter> base;
        if (!ai_mock.empty()) {
            base = std::make_unique<MockAdapter>(MockAdapter::from_json(read_json(ai_mock)));
        } else if (!ai_replay.empty()) {
            base = std::make_unique<ReplayAdapter>(ReplayAdapter::from_file(ai_replay));
        } else {
            throw CLI::ValidationError("need --mock or --replay");
        }
        std::unique_ptr<RecordingAdapter> recorder;
        AiAdapter* adapter = base.get();
        if (!ai_record.empty()) {
            recorder = std::make_unique<RecordingAdapter>(*base, ai_record);
            adapter = recorder.get();
        }
        const auto out = s.collect_ai(*adapter, ai_panelist, c.actor);
        s.save_snapshot();
        print_json({{"schema_version", kSchemaVersion},
                    {"requested", out.requested},
                    {"ingested", out.ingested},
                    {"quarantined", out.quarantined}});
    });

    // study classify
    auto* cmd_classify = study->add_subcommand("classify", "Classify every quorate item not yet classified");
    add_common(cmd_classify, c);
    cmd_classify->callback([&] {
        auto s = open_study(c);
        s.classify_all(c.actor);
        s.save_snapshot();
        print_classifications(s.state(), c.format);
    });

    // study saturation
    std::string sat_role = "senior_expert", sat_mode = "exhaustive";
    std::size_t sat_count = 1000;
    std::optional<std::uint64_t> sat_seed;
    auto* cmd_sat = study->add_subcommand("saturation", "Coverage trajectory and order robustness");
    add_common(cmd_sat, c);
    cmd_sat->add_option("--role", sat_role);
    cmd_sat->add_option("--mode", sat_mode)->check(CLI::IsMember({"exhaustive", "sampled"}));
    cmd_sat->add_option("--count", sat_count);
    cmd_sat->add_option("--seed", sat_seed);
    cmd_sat->callback([&] {
        auto s = open_study(c);
        RobustnessMode mode;
        if (sat_mode == "sampled") {
            mode.kind = RobustnessMode::Kind::sampled;
            mode.count = sat_count;
            mode.seed = sat_seed;
        }
        const auto report = permutation_robustness(s.study(), parse_enum<Role>(sat_role), mode);
        if (c.format == "csv") {
            std::cout << coverage_curve_csv(report.canonical);
        } else if (c.format == "md") {
            std::cout << "Panel of " << report.panel_size << "; required pairs " << report.canonical.required.size()
                      << "; saturation index "
                      << (report.saturation_index ? std::to_string(*report.saturation_index) : "none")
                      << "; max over orderings " << report.max_index << "; robust "
                      << (report.robust ? "yes" : "no") << '\n';
        } else {
            print_json(saturation_json(report));
        }
    });

    // study align
    std::string al_item, al_category, al_rationale;
    auto* cmd_align = study->add_subcommand("align", "AI alignment summary, or record a facilitator override");
    add_common(cmd_align, c);
    cmd_align->add_option("--override", al_item, "Item to override");
    cmd_align->add_option("--category", al_category);
    cmd_align->add_option("--rationale", al_rationale);
    cmd_align->callback([&] {
        auto s = open_study(c);
        if (!al_item.empty()) {
            s.override_alignment(al_item, parse_enum<AlignmentCategory>(al_category), al_rationale, c.actor);
            s.save_snapshot();
        }
        const auto t = alignment_summary(s.study(), s.state().overrides);
        if (c.format == "csv") {
            std::cout << alignment_csv(t);
        } else if (c.format == "md") {
            std::cout << "Band concordance " << t.concordant() << " of " << t.total() << " ("
                      << format_percent(static_cast<std::int64_t>(t.concordant()), static_cast<std::int64_t>(t.total()))
                      << ")\n";
        } else {
            print_json(alignment_json(t));
        }
    });

    // study adjudicate
    std::string adj_item, adj_basis, adj_rationale;
    auto* cmd_adj = study->add_subcommand("adjudicate", "Record a compatibility judgment or reclassify");
    add_common(cmd_adj, c, false);
    cmd_adj->add_option("--item", adj_item)->required();
    cmd_adj->add_option("--basis", adj_basis)->required();
    cmd_adj->add_option("--rationale", adj_rationale);
    cmd_adj->callback([&] {
        auto s = open_study(c);
        const auto out = s.adjudicate(adj_item, parse_enum<Basis>(adj_basis), adj_rationale, c.actor);
        s.save_snapshot();
        json j = {{"schema_version", kSchemaVersion}, {"route", out.route}, {"annotation", out.annotation}};
        if (out.classification) j["classification"] = *out.classification;
        print_json(j);
    });

    // study report
    auto* cmd_report = study->add_subcommand("report", "Emit report.md, tiers.csv and report.json");
    add_common(cmd_report, c);
    cmd_report->callback([&] {
        auto s = open_study(c);
        const auto r = s.emit_report(c.actor);
        s.save_snapshot();
        std::cout << (c.format == "md" ? r.markdown : c.format == "csv" ? r.tiers_csv : r.json_text);
    });

    // study replay
    std::string replay_out;
    auto* cmd_replay = study->add_subcommand("replay", "Rebuild state from the audit log and compare report files");
    add_common(cmd_replay, c, false);
    cmd_replay->add_option("--out", replay_out, "Write rebuilt report files here");
    cmd_replay->callback([&] {
        const auto events = read_event_log(fs::path(c.study_dir) / kEventLogFile);
        const auto state = replay_events(events);
        json result = {{"schema_version", kSchemaVersion}, {"events", events.size()}, {"state", state.study.round_state}};
        if (state.study.round_state == WorkflowState::classified || state.study.round_state == WorkflowState::reported) {
            const auto r = render_report(state);
            json files = json::object();
            bool identical = true;
            for (const auto& [name, text] : {std::pair{kReportMarkdownFile, &r.markdown},
                                             std::pair{kTiersCsvFile, &r.tiers_csv},
                                             std::pair{kReportJsonFile, &r.json_text}}) {
                const auto path = fs::path(c.study_dir) / name;
                std::string verdict = "absent";
                if (fs::exists(path)) {
                    verdict = read_file(path.string()) == *text ? "identical" : "different";
                    identical = identical && verdict == "identical";
                }
                files[std::string(name)] = verdict;
            }
            result["files"] = files;
            result["identical"] = identical;
            if (!replay_out.empty()) {
                fs::create_directories(replay_out);
                write_report_files(replay_out, r);
            }
            print_json(result);
            if (!identical) throw CLI::RuntimeError(4);
            return;
        }
        print_json(result);
    });

    // study prompt
    std::string pr_item;
    auto* cmd_prompt = study->add_subcommand("prompt", "Print the AI prompt for one item");
    add_common(cmd_prompt, c, false);
    cmd_prompt->add_option("--item", pr_item)->required();
    cmd_prompt->callback([&] {
        auto s = open_study(c);
        if (!s.study().corpus) throw Error("missing corpus", s.study().id);
        const Item* item = s.study().find_item(pr_item);
        if (!item) throw Error("unknown item", pr_item);
        std::cout << build_prompt(*item, *s.study().corpus, item->format).text;
    });

    // corpus admit
    std::string corpus_file;
    auto* corpus = app.add_subcommand("corpus", "Evaluate a corpus document");
    corpus->add_option("--file", corpus_file, "CorpusSpec document (JSON)")->required();
    corpus->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv", "md"}));
    corpus->callback([&] {
        const auto doc = read_json(corpus_file);
        require_schema(doc);
        const auto spec = guard_document([&] { return doc.get<CorpusSpec>(); });
        const auto decisions = admit_all(spec);
        if (c.format == "json") {
            print_json({{"schema_version", kSchemaVersion}, {"cutoff", spec.cutoff_date}, {"decisions", decisions}});
            return;
        }
        std::cout << "source_id,admitted,reason,trust_level\n";
        for (const auto& d : decisions) {
            std::cout << csv::escape(d.source_id) << ',' << (d.admitted ? "yes" : "no") << ',' << csv::escape(d.reason)
                      << ',' << (d.trust_level ? std::to_string(*d.trust_level) : "") << '\n';
        }
    });

    // suggest
    std::string text, lexicon_file;
    auto* suggest = app.add_subcommand("suggest", "Suggest reasoning codes for a justification");
    suggest->add_option("--text", text)->required();
    suggest->add_option("--lexicon", lexicon_file, "Lexicon TSV (defaults to the built-in table)");
    suggest->callback([&] {
        const auto lex = lexicon_file.empty() ? Lexicon::builtin() : Lexicon::parse(read_file(lexicon_file));
        json out = json::array();
        for (const auto& sgg : suggest_codes(text, lex)) out.push_back({{"category", sgg.category}, {"score", sgg.score}});
        print_json({{"schema_version", kSchemaVersion}, {"lexicon_version", lex.version()}, {"suggestions", out}});
    });

    // serve
    std::string root = ".", host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the study HTTP API");
    serve->add_option("--root", root, "Directory holding one subdirectory per study");
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->callback([&] {
        ApiService api(root);
        httplib::Server server;
        bind_http(server, api);
        std::cerr << "listening on " << host << ':' << port << '\n';
        if (!server.listen(host, port)) throw Error("listen failure", host + ":" + std::to_string(port));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

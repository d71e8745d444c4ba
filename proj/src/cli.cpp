#include "aibom/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>

#include "aibom/audit.hpp"
#include "aibom/inspector.hpp"
#include "aibom/io.hpp"
#include "aibom/matcher.hpp"
#include "aibom/provenance.hpp"
#include "aibom/signing.hpp"
#include "aibom/validator.hpp"
#include "aibom/vulnerability.hpp"

namespace aibom {
namespace {

constexpr std::string_view kValidationSuccess =
    "Validation successful: AIBOM conforms to SACRO-specific schema.";

// A document failed validation where a valid one was required.
struct InvalidInput : Error {
  InvalidInput(const std::string& what, ValidationReport r) : Error(what), report(std::move(r)) {}
  ValidationReport report;
};

struct Globals {
  bool strict = false;
  std::string format = "human";
  std::string key_path;
  std::string vuln_source = "both";
};

class Printer {
 public:
  Printer(std::ostream& out, std::ostream& err, bool json) : out_(out), err_(err), json_(json) {}

  bool json() const { return json_; }
  /// Human-readable result text: stdout in human mode, stderr in JSON mode.
  std::ostream& text() { return json_ ? err_ : out_; }
  std::ostream& warn() { return err_; }
  void emit(const Json& doc) {
    if (json_) out_ << doc.dump(2) << "\n";
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool json_;
};

void print_violations(std::ostream& os, const ValidationReport& report) {
  for (const auto& v : report.violations)
    os << "  " << (v.path.empty() ? "/" : v.path) << ": [" << v.rule << "] " << v.message << "\n";
}

AibomDocument load_valid_document(const std::string& path, bool strict) {
  const std::string text = read_file(path);
  ValidationOptions options;
  options.strict = strict;
  ValidationReport report = validate_structure(text, options);
  if (!report.valid)
    throw InvalidInput(path + ": document is not a valid AIBOM (" + std::to_string(report.violations.size()) +
                           " violation(s))",
                       std::move(report));
  return parse_document(text);
}

std::optional<std::string> env_value(const CliEnvironment& env, std::string_view name) {
  auto v = env.getenv(name);
  if (v && v->empty()) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------- validate

int cmd_validate(Printer& p, const Globals& g, const std::string& path,
                 const std::vector<std::string>& vocabulary) {
  ValidationOptions options;
  options.strict = g.strict;
  options.extra_vocabulary.insert(vocabulary.begin(), vocabulary.end());
  const ValidationReport report = validate_file(path, options);
  p.emit(to_json(report));
  if (report.valid) {
    p.text() << kValidationSuccess << "\n";
    return kExitClean;
  }
  const bool syntax = report.has_rule(rule::kJsonSyntax);
  p.text() << (syntax ? "Validation error: " : "Validation failed: ") << report.violations.size()
           << " violation(s)\n";
  print_violations(p.text(), report);
  return syntax ? kExitError : kExitFinding;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::vector<std::string> pip, conda, dpkg, import_logs, artifacts;
  std::string model;
  std::string model_name, model_version = "0.0.0", model_arch;
  std::optional<std::uint64_t> model_params;
  std::vector<std::string> hyperparameters;
  std::string training_data, disclosure_control, container_digest;
  std::string root_name = "analytic-job", root_version = "0.0.0";
  std::string stage = "pre-load";
  std::string timestamp;
  std::string output;
};

int cmd_generate(Printer& p, const CliEnvironment& env, const GenerateArgs& a) {
  if (a.pip.empty() && a.conda.empty() && a.dpkg.empty() && a.import_logs.empty() && a.model.empty())
    throw DomainError("generate: supply at least one of --pip, --conda, --dpkg, --import-log or --model");
  const std::string at = a.timestamp.empty() ? env.now() : a.timestamp;
  if (!is_rfc3339(at)) throw DomainError("--timestamp must be an RFC 3339 date-time");
  const Stage stage = parse_stage(a.stage);

  std::vector<DependencyDecl> deps;
  std::vector<OutputFile> inputs;
  auto note_input = [&](const std::string& path) {
    inputs.push_back(OutputFile{std::filesystem::path(path).generic_string(), std::filesystem::path(path),
                                guess_mime_type(path)});
  };
  auto append = [&](std::vector<DependencyDecl> more) {
    deps.insert(deps.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  for (const auto& f : a.pip) {
    append(parse_pip_manifest(read_file(f), f));
    note_input(f);
  }
  for (const auto& f : a.conda) {
    append(parse_conda_env(read_file(f), f));
    note_input(f);
  }
  for (const auto& f : a.dpkg) {
    append(parse_dpkg_status(read_file(f), f));
    note_input(f);
  }
  for (const auto& f : a.import_logs) {
    ImportLogResult r = ingest_runtime_import_log(read_file(f), f);
    if (r.malformed > 0) p.warn() << "warning: " << f << ": " << r.malformed << " malformed line(s) skipped\n";
    append(std::move(r.declarations));
    note_input(f);
  }

  std::vector<ArtifactDigest> artifacts;
  for (const auto& f : a.artifacts) artifacts.push_back(hash_file(f));

  AibomDocument doc;
  doc.metadata.timestamp = at;
  doc.metadata.tools.push_back({std::string(kToolVendor), std::string(kToolName), std::string(kToolVersion)});

  if (!a.model.empty()) {
    std::map<std::string, std::string> hyper;
    for (const auto& kv : a.hyperparameters) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw DomainError("--hyperparameter expects key=value: " + kv);
      hyper[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    const auto state = capture_model_state(a.model, a.model_arch, a.model_params, std::move(hyper));
    const std::string name = a.model_name.empty() ? std::filesystem::path(a.model).stem().string() : a.model_name;
    ComponentRecord model = model_state_to_component(state, name, a.model_version);
    if (!a.training_data.empty()) model.set_property("x-sacrospec-trainingDataSource", a.training_data);
    if (!a.disclosure_control.empty()) model.set_property("x-sacrospec-disclosureControlType", a.disclosure_control);
    doc.components.push_back(std::move(model));
    note_input(a.model);
  }

  const SnapshotCapture snap = capture_snapshot(stage, deps, artifacts, at);
  for (auto& c : snapshot_to_components(snap)) doc.components.push_back(std::move(c));

  // The root digest commits to every input the inventory was derived from.
  const auto input_digests = digest_output_set(inputs);
  const MerkleTree tree = build_merkle(input_digests);
  ComponentRecord& root = doc.metadata.component;
  root.type = "application";
  root.name = a.root_name;
  root.version = a.root_version;
  root.hashes.push_back({"SHA-256", tree.root().hex()});
  root.properties.emplace();
  root.set_property("x-sacrospec-captureStage", std::string(to_string(stage)));
  if (!a.container_digest.empty()) {
    auto d = Sha256Digest::from_prefixed(to_lower_ascii(a.container_digest));
    if (!d) d = Sha256Digest::from_hex(to_lower_ascii(a.container_digest));
    if (!d) throw DomainError("--container-digest must be sha256:<64 hex>");
    root.set_property("x-sacrospec-treContainerHash", d->prefixed());
  }

  const std::string text = serialize_pretty(doc);
  // Self-check: whatever we emit must validate in lenient mode.
  const ValidationReport check = validate_structure(text);
  if (!check.valid) {
    print_violations(p.warn(), check);
    throw DomainError("generated document failed validation");
  }

  std::size_t unverifiable = 0;
  for (const auto& c : doc.components)
    if (const std::string* f = c.property(kUnverifiableProperty); f && *f == "true") ++unverifiable;

  if (a.output.empty()) {
    // The document itself is the single JSON output.
    p.text() << "generated " << doc.components.size() << " component(s)\n";
    if (p.json()) p.emit(to_json(doc));
    else p.text() << text;
    return kExitClean;
  }
  write_file_atomic(a.output, text);
  p.emit({{"output", a.output},
          {"components", doc.components.size()},
          {"unverifiable", unverifiable},
          {"rootDigest", tree.root().prefixed()}});
  p.text() << "wrote " << a.output << ": " << doc.components.size() << " component(s), root "
           << tree.root().prefixed() << "\n";
  if (unverifiable > 0) p.warn() << "note: " << unverifiable << " component(s) flagged unverifiable\n";
  return kExitClean;
}

// ---------------------------------------------------------------- bind

int cmd_bind(Printer& p, const Globals& g, const std::string& path, const std::vector<std::string>& files,
             const std::string& output) {
  if (files.empty()) throw DomainError("bind: at least one output file is required");
  AibomDocument doc = load_valid_document(path, g.strict);
  std::vector<OutputFile> outputs;
  for (const auto& f : files) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(f, ec)) throw IoError(f + ": no such file");
    outputs.push_back(output_from_path(f));
  }
  const auto digests = digest_output_set(outputs);
  const bool was_signed = doc.signature.has_value();
  AibomDocument bound = bind_outputs(doc, digests);
  const std::string root = build_merkle(digests).root().prefixed();
  const std::string target = output.empty() ? path : output;
  write_file_atomic(target, serialize_pretty(bound));
  if (was_signed)
    p.warn() << "warning: " << path << " was signed; binding outputs invalidates that signature. Re-sign it.\n";
  Json files_json = Json::array();
  for (const auto& d : digests)
    files_json.push_back({{"name", d.source_name}, {"byteSize", d.byte_size}, {"digest", d.digest.prefixed()}});
  p.emit({{"document", target}, {"outputDigest", root}, {"files", files_json}, {"signatureInvalidated", was_signed}});
  p.text() << "bound " << digests.size() << " output(s) to " << target << ": " << root << "\n";
  return kExitClean;
}

// ---------------------------------------------------------------- sign / verify

int cmd_sign(Printer& p, const Globals& g, const CliEnvironment& env, const std::string& path,
             const std::string& timestamp, const std::string& output) {
  if (g.key_path.empty()) throw DomainError("sign: --key <path> is required");
  AibomDocument doc = load_valid_document(path, g.strict);
  const KeyPair key = load_keypair(g.key_path, env_value(env, "AIBOM_KEY_PASSPHRASE"));
  const std::string at = timestamp.empty() ? env.now() : timestamp;
  const AibomDocument signed_doc = sign_document(doc, key, at);
  const std::string target = output.empty() ? path : output;
  write_file_atomic(target, serialize_pretty(signed_doc));
  const auto& sig = *signed_doc.signature;
  p.emit({{"document", target}, {"alg", sig.alg}, {"publicKey", sig.public_key}, {"timestamp", sig.timestamp}});
  p.text() << "signed " << target << " (" << sig.alg << ", " << sig.timestamp << ")\n";
  return kExitClean;
}

int cmd_verify(Printer& p, const Globals& g, const CliEnvironment& env, const std::string& path) {
  const std::string text = read_file(path);
  const AibomDocument doc = parse_document(text);
  if (!doc.signature) throw DomainError(path + ": document carries no signature envelope");
  bool valid = verify_document(doc);
  bool key_matches = true;
  if (!g.key_path.empty()) {
    // Pinning: the envelope must name the holder of the given key.
    const KeyPair key = load_keypair(g.key_path, env_value(env, "AIBOM_KEY_PASSPHRASE"));
    key_matches = key.public_key == doc.signature->public_key;
    valid = valid && key_matches;
  }
  p.emit({{"document", path},
          {"valid", valid},
          {"alg", doc.signature->alg},
          {"timestamp", doc.signature->timestamp},
          {"keyPinned", !g.key_path.empty()},
          {"keyMatches", key_matches}});
  if (valid) p.text() << "signature valid (" << doc.signature->alg << ", " << doc.signature->timestamp << ")\n";
  else if (!key_matches) p.text() << "signature INVALID: envelope key does not match --key\n";
  else p.text() << "signature INVALID\n";
  return valid ? kExitClean : kExitFinding;
}

// ---------------------------------------------------------------- scan

std::string score_label(const CveRecord& r) {
  if (!r.cvss_score) return "unscored";
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << *r.cvss_score;
  return os.str();
}

int cmd_scan(Printer& p, const Globals& g, const CliEnvironment& env, const std::string& path,
             const std::string& alias_file) {
  const AibomDocument doc = load_valid_document(path, g.strict);

  CpeAliasTable aliases = CpeAliasTable::bundled();
  if (!alias_file.empty()) {
    const Json j = Json::parse(read_file(alias_file), nullptr, false);
    if (j.is_discarded()) throw ParseError(alias_file + ": not JSON", 0);
    aliases.merge(CpeAliasTable::from_json(j));
  }

  std::unique_ptr<VulnerabilitySource> source;
  std::unique_ptr<HttpTransport> owned_transport;
  bool use_osv = true, use_nvd = true;
  if (g.vuln_source.starts_with("offline:")) {
    source = std::make_unique<OfflineFixtureSource>(g.vuln_source.substr(8));
  } else {
    use_osv = g.vuln_source != "nvd";
    use_nvd = g.vuln_source != "osv";
    HttpTransport* transport = env.transport;
    if (!transport) {
      owned_transport = make_http_transport();
      transport = owned_transport.get();
    }
    LiveSourceOptions options;
    if (auto v = env_value(env, "AIBOM_OSV_URL")) options.osv_base = *v;
    if (auto v = env_value(env, "AIBOM_NVD_URL")) options.nvd_base = *v;
    options.nvd_api_key = env_value(env, "NVD_API_KEY");
    source = std::make_unique<LiveSource>(*transport, options);
  }

  const KnownArtifactIndex* known = source->known_artifacts();
  const QueryPlan plan = plan_queries(doc, known, aliases);

  struct Outcome {
    std::vector<CveRecord> records;
    std::optional<std::string> error;
    bool empty_failure = false;
  };
  auto run = [](auto fn) {
    Outcome o;
    try {
      o.records = fn();
    } catch (const SourceUnavailableError& e) {
      o.records = e.partial();
      o.error = e.what();
      o.empty_failure = e.partial().empty();
    }
    return o;
  };
  // The two sources are independent and may be queried concurrently.
  std::future<Outcome> osv_future, nvd_future;
  if (use_osv) osv_future = std::async(std::launch::async, [&] { return run([&] { return query_osv(plan.purls, *source); }); });
  if (use_nvd) nvd_future = std::async(std::launch::async, [&] { return run([&] { return query_nvd(plan.cpes, *source); }); });
  std::vector<CveRecord> records;
  Json source_errors = Json::array();
  bool fatal = false;
  for (auto* f : {&osv_future, &nvd_future}) {
    if (!f->valid()) continue;
    Outcome o = f->get();
    records.insert(records.end(), o.records.begin(), o.records.end());
    if (o.error) {
      source_errors.push_back(*o.error);
      p.warn() << "warning: " << *o.error << (o.empty_failure ? "" : " (continuing with partial results)") << "\n";
      fatal = fatal || o.empty_failure;
    }
  }
  if (fatal) throw SourceUnavailableError("vulnerability source unavailable and no results were obtained", {});

  const CveMatchReport report = match_components(doc, merge_records(std::move(records)), known, aliases);
  Json j = to_json(report);
  j["queried"] = {{"purls", plan.purls.size()}, {"cpes", plan.cpes.size()}};
  j["sourceErrors"] = source_errors;
  p.emit(j);

  auto& os = p.text();
  for (const auto& m : report.matches)
    os << to_string(m.severity) << "  " << m.cve.id << "  " << m.component.name << "@" << m.component.version
       << "  (" << to_string(m.basis) << ", CVSS " << score_label(m.cve) << ")\n";
  for (const auto& u : report.unverifiable) os << "unverifiable  " << u.name << "@" << u.version << "\n";
  for (const auto& a : report.mitigations)
    os << "mitigation  " << to_string(a.kind) << "  " << a.target.name << "@" << a.target.version << ": "
       << a.rationale << "\n";
  os << report.matches.size() << " match(es), " << report.critical_alerts << " critical alert(s), "
     << report.unverifiable.size() << " unverifiable component(s)\n";
  return report.critical_alerts > 0 ? kExitFinding : kExitClean;
}

// ---------------------------------------------------------------- audit

int cmd_audit(Printer& p, const Globals& g, const std::string& original_path, const std::string& replay_path,
              const std::string& container_digest, const std::vector<std::string>& outputs) {
  const AibomDocument original = load_valid_document(original_path, g.strict);
  const AibomDocument replay = load_valid_document(replay_path, g.strict);
  const FidelityReport report = replay_compare(original, replay);
  Json j = to_json(report);
  bool ok = report.perfect();
  auto& os = p.text();
  os << "fidelity " << report.fidelity_pct() << "% (" << report.matched << "/" << report.total << " matched)\n";
  for (const auto& d : report.deviations)
    os << "  " << to_string(d.kind) << "  " << d.type << " " << d.component.name << "@" << d.component.version
       << ": " << d.detail << "\n";
  if (!container_digest.empty()) {
    const bool c = verify_container(replay, container_digest);
    j["containerVerified"] = c;
    os << "container digest " << (c ? "verified" : "MISMATCH") << "\n";
    ok = ok && c;
  }
  if (!outputs.empty()) {
    std::vector<OutputFile> files;
    for (const auto& f : outputs) {
      std::error_code ec;
      if (!std::filesystem::is_regular_file(f, ec)) throw IoError(f + ": no such file");
      files.push_back(output_from_path(f));
    }
    const bool o = verify_outputs(original, files);
    j["outputsVerified"] = o;
    os << "output digest " << (o ? "verified" : "MISMATCH") << "\n";
    ok = ok && o;
  }
  p.emit(j);
  return ok ? kExitClean : kExitFinding;
}

// ---------------------------------------------------------------- keygen

int cmd_keygen(Printer& p, const std::string& alg, const std::string& output, bool force) {
  std::error_code ec;
  if (!force && std::filesystem::exists(output, ec))
    throw IoError(output + ": already exists (use --force to overwrite)");
  const KeyPair key = generate_keypair(alg);
  const SecretBytes material(key_file_bytes(key));
  const auto bytes = material.view();
  write_file_atomic(output, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), true);
  p.emit({{"keyFile", output}, {"alg", envelope_name(key.alg)}, {"publicKey", key.public_key}});
  p.text() << "wrote " << envelope_name(key.alg) << " private key to " << output << " (mode 0600)\n"
           << "public key: " << key.public_key << "\n";
  return kExitClean;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env_in) {
  CliEnvironment env = env_in;
  if (!env.getenv)
    env.getenv = [](std::string_view name) -> std::optional<std::string> {
      const char* v = std::getenv(std::string(name).c_str());
      return v ? std::optional<std::string>(v) : std::nullopt;
    };
  if (!env.now) env.now = [] { return now_rfc3339(); };

  CLI::App app{"AIBOM toolkit: validate, generate, bind, sign, verify, scan and audit SACRO AIBOMs", "aibom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Globals g;
  app.add_flag("--strict", g.strict, "Require the x-sacrospec- prefix on extension properties");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"human", "json"}));
  app.add_option("--key", g.key_path, "Private key file (sign) or key to pin (verify)");
  app.add_option("--vuln-source", g.vuln_source, "osv | nvd | both | offline:<dir>")
      ->check([](const std::string& v) -> std::string {
        if (v == "osv" || v == "nvd" || v == "both") return {};
        if (v.starts_with("offline:") && v.size() > 8) return {};
        return "expected osv, nvd, both or offline:<dir>";
      });

  std::string path, path2, output, timestamp, alias_file, container_digest, alg = "Ed25519";
  std::vector<std::string> files, vocabulary;
  bool force = false;
  GenerateArgs gen;

  auto* validate = app.add_subcommand("validate", "Check a document against the SACRO AIBOM rules");
  validate->add_option("document", path)->required();
  validate->add_option("--vocabulary", vocabulary, "Additional disclosure-control terms");

  auto* generate = app.add_subcommand("generate", "Inventory manifests and a model into a new AIBOM");
  generate->add_option("--pip", gen.pip, "requirements.txt-format manifest");
  generate->add_option("--conda", gen.conda, "environment.yml");
  generate->add_option("--dpkg", gen.dpkg, "dpkg status file");
  generate->add_option("--import-log", gen.import_logs, "Runtime import log");
  generate->add_option("--artifact", gen.artifacts, "Package archive whose digest identifies a dependency");
  generate->add_option("--model", gen.model, "Serialized model file");
  generate->add_option("--model-name", gen.model_name);
  generate->add_option("--model-version", gen.model_version);
  generate->add_option("--model-arch", gen.model_arch);
  generate->add_option("--model-params", gen.model_params, "Parameter count");
  generate->add_option("--hyperparameter", gen.hyperparameters, "key=value");
  generate->add_option("--training-data-source", gen.training_data);
  generate->add_option("--disclosure-control", gen.disclosure_control);
  generate->add_option("--container-digest", gen.container_digest, "sha256:<hex> of the job container");
  generate->add_option("--name", gen.root_name, "Root application name");
  generate->add_option("--app-version", gen.root_version, "Root application version");
  generate->add_option("--stage", gen.stage)->check(CLI::IsMember({"pre-load", "runtime", "post-execution"}));
  generate->add_option("--timestamp", gen.timestamp, "RFC 3339; defaults to now");
  generate->add_option("-o,--output", gen.output, "Write here instead of stdout");

  auto* bind = app.add_subcommand("bind", "Bind analytic outputs to a document by Merkle root");
  bind->add_option("document", path)->required();
  bind->add_option("outputs", files, "Output files");
  bind->add_option("-o,--output", output, "Write here instead of in place");

  auto* sign = app.add_subcommand("sign", "Sign a document in place");
  sign->add_option("document", path)->required();
  sign->add_option("--timestamp", timestamp, "RFC 3339; defaults to now");
  sign->add_option("-o,--output", output, "Write here instead of in place");

  auto* verify = app.add_subcommand("verify", "Verify a document's signature");
  verify->add_option("document", path)->required();

  auto* scan = app.add_subcommand("scan", "Match components against OSV/NVD vulnerability records");
  scan->add_option("document", path)->required();
  scan->add_option("--cpe-aliases", alias_file, "JSON alias table merged over the bundled one");

  auto* audit = app.add_subcommand("audit", "Compare an original document with a replay");
  audit->add_option("original", path)->required();
  audit->add_option("recomputed", path2)->required();
  audit->add_option("--container-digest", container_digest, "Observed container digest to verify");
  audit->add_option("--outputs", files, "Output files to verify against the original's outputDigest");

  auto* keygen = app.add_subcommand("keygen", "Create a signing key file");
  keygen->add_option("--alg", alg)->check(CLI::IsMember({"Ed25519", "ECDSA-P256"}));
  keygen->add_option("-o,--output", output)->required();
  keygen->add_flag("--force", force, "Overwrite an existing key file");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    if (g.format == "json") out << Json{{"error", e.what()}, {"exitCode", kExitError}}.dump(2) << "\n";
    return kExitError;
  }

  Printer p(out, err, g.format == "json");
  try {
    if (*validate) return cmd_validate(p, g, path, vocabulary);
    if (*generate) return cmd_generate(p, env, gen);
    if (*bind) return cmd_bind(p, g, path, files, output);
    if (*sign) return cmd_sign(p, g, env, path, timestamp, output);
    if (*verify) return cmd_verify(p, g, env, path);
    if (*scan) return cmd_scan(p, g, env, path, alias_file);
    if (*audit) return cmd_audit(p, g, path, path2, container_digest, files);
    if (*keygen) return cmd_keygen(p, alg, output, force);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    print_violations(err, e.report);
    p.emit({{"error", e.what()}, {"exitCode", kExitError}, {"validation", to_json(e.report)}});
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    p.emit({{"error", e.what()}, {"exitCode", kExitError}});
    return kExitError;
  }
  return kExitError;
}

}  // namespace aibom

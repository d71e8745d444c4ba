#include "aibom/provenance.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "aibom/crypto.hpp"
#include "aibom/errors.hpp"

namespace aibom {
namespace {

constexpr std::size_t kChunk = 64 * 1024;

// Streams `in` into `hasher`, dropping the CR of every CRLF pair when asked.
std::uint64_t feed(std::istream& in, Sha256Hasher& hasher, bool normalize) {
  std::array<char, kChunk> buf{};
  std::uint64_t total = 0;
  bool pending_cr = false;
  std::string out;
  while (in) {
    in.read(buf.data(), buf.size());
    const auto n = static_cast<std::size_t>(in.gcount());
    if (n == 0) break;
    if (!normalize) {
      hasher.update(std::string_view(buf.data(), n));
      total += n;
      continue;
    }
    out.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const char c = buf[i];
      if (pending_cr) {
        if (c != '\n') out += '\r';
        pending_cr = false;
      }
      if (c == '\r') pending_cr = true;
      else out += c;
    }
    hasher.update(out);
    total += out.size();
  }
  if (pending_cr) {
    hasher.update(std::string_view("\r"));
    ++total;
  }
  if (in.bad() || (in.fail() && !in.eof())) throw IoError("stream read failed");
  return total;
}

}  // namespace

ArtifactDigest hash_stream(std::istream& in, std::string source_name, std::string mime_type,
                           const HashOptions& options) {
  if (!in) throw IoError("stream is not readable");
  Sha256Hasher hasher;
  const auto size = feed(in, hasher, options.normalize_newlines);
  return ArtifactDigest{hasher.finish(), std::move(source_name), size, std::move(mime_type)};
}

ArtifactDigest hash_bytes(std::string_view bytes, std::string source_name,
                          std::string mime_type, const HashOptions& options) {
  std::istringstream in{std::string(bytes)};
  return hash_stream(in, std::move(source_name), std::move(mime_type), options);
}

ArtifactDigest hash_file(const std::filesystem::path& path, const HashOptions& options) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw IoError(path.string() + ": not a readable regular file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  try {
    return hash_stream(in, path.filename().string(), guess_mime_type(path), options);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string guess_mime_type(const std::filesystem::path& path) {
  static const std::map<std::string, std::string, std::less<>> kTypes = {
      {".csv", "text/csv"},
      {".tsv", "text/tab-separated-values"},
      {".txt", "text/plain"},
      {".json", "application/json"},
      {".pdf", "application/pdf"},
      {".png", "image/png"},
      {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"},
      {".svg", "image/svg+xml"},
      {".html", "text/html"},
      {".pkl", "application/x-python-pickle"},
      {".pickle", "application/x-python-pickle"},
      {".parquet", "application/vnd.apache.parquet"},
      {".onnx", "application/onnx"},
      {".pt", "application/x-pytorch"},
      {".pb", "application/x-protobuf"},
  };
  auto it = kTypes.find(to_lower_ascii(path.extension().string()));
  return it == kTypes.end() ? "application/octet-stream" : it->second;
}

OutputFile output_from_path(const std::filesystem::path& path) {
  return OutputFile{path.filename().string(), path, guess_mime_type(path)};
}

std::vector<ArtifactDigest> digest_output_set(const std::vector<OutputFile>& files,
                                              const HashOptions& options) {
  std::vector<const OutputFile*> order;
  order.reserve(files.size());
  for (const auto& f : files) order.push_back(&f);
  std::sort(order.begin(), order.end(),
            [](const OutputFile* a, const OutputFile* b) { return a->name < b->name; });

  std::set<std::string> duplicates;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i]->name == order[i - 1]->name) duplicates.insert(order[i]->name);
  if (!duplicates.empty()) {
    std::string list;
    for (const auto& d : duplicates) list += (list.empty() ? "" : ", ") + d;
    throw DomainError("duplicate output names: " + list);
  }

  std::vector<ArtifactDigest> out;
  out.reserve(order.size());
  for (const OutputFile* f : order) {
    if (const auto* bytes = std::get_if<std::string>(&f->content)) {
      out.push_back(hash_bytes(*bytes, f->name, f->mime_type, options));
    } else {
      auto d = hash_file(std::get<std::filesystem::path>(f->content), options);
      d.source_name = f->name;
      d.mime_type = f->mime_type;
      out.push_back(std::move(d));
    }
  }
  return out;
}

Sha256Digest hash_pair(const Sha256Digest& left, const Sha256Digest& right) {
  Sha256Hasher h;
  h.update(left.raw());
  h.update(right.raw());
  return h.finish();
}

MerkleTree build_merkle(std::vector<ArtifactDigest> leaves) {
  if (leaves.empty()) throw DomainError("cannot build a Merkle tree without leaves");
  MerkleTree tree;
  std::vector<Sha256Digest> level;
  level.reserve(leaves.size());
  for (const auto& l : leaves) level.push_back(l.digest);
  tree.leaves = std::move(leaves);
  tree.levels.push_back(level);
  while (level.size() > 1) {
    std::vector<Sha256Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
      next.push_back(hash_pair(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    tree.levels.push_back(next);
    level = std::move(next);
  }
  return tree;
}

MerkleProof prove_leaf(const MerkleTree& tree, std::size_t index) {
  if (index >= tree.leaves.size())
    throw DomainError("leaf index " + std::to_string(index) + " out of range (" +
                      std::to_string(tree.leaves.size()) + " leaves)");
  MerkleProof proof{index, {}};
  std::size_t pos = index;
  for (std::size_t lvl = 0; lvl + 1 < tree.levels.size(); ++lvl) {
    const auto& nodes = tree.levels[lvl];
    if (pos % 2 == 1) {
      proof.siblings.push_back({nodes[pos - 1], Side::kLeft});
    } else if (pos + 1 < nodes.size()) {
      proof.siblings.push_back({nodes[pos + 1], Side::kRight});
    }
    // A promoted trailing node contributes no step at this level.
    pos /= 2;
  }
  return proof;
}

bool verify_proof(const Sha256Digest& root, const ArtifactDigest& leaf, const MerkleProof& proof) {
  Sha256Digest running = leaf.digest;
  for (const auto& step : proof.siblings)
    running = step.side == Side::kLeft ? hash_pair(step.sibling, running)
                                       : hash_pair(running, step.sibling);
  return running == root;
}

std::string output_record(const ArtifactDigest& d) {
  const Json j = {{"name", d.source_name},
                  {"byteSize", d.byte_size},
                  {"mimeType", d.mime_type},
                  {"digest", d.digest.prefixed()}};
  return j.dump();
}

std::optional<ArtifactDigest> parse_output_record(std::string_view value) {
  const Json j = Json::parse(value, nullptr, false);
  if (!j.is_object()) return std::nullopt;
  auto name = j.find("name");
  auto size = j.find("byteSize");
  auto mime = j.find("mimeType");
  auto digest = j.find("digest");
  if (name == j.end() || !name->is_string() || size == j.end() || !size->is_number_unsigned() ||
      mime == j.end() || !mime->is_string() || digest == j.end() || !digest->is_string())
    return std::nullopt;
  auto parsed = Sha256Digest::from_prefixed(digest->get<std::string>());
  if (!parsed) return std::nullopt;
  return ArtifactDigest{*parsed, name->get<std::string>(), size->get<std::uint64_t>(),
                        mime->get<std::string>()};
}

AibomDocument bind_outputs(const AibomDocument& doc, const std::vector<ArtifactDigest>& outputs) {
  if (outputs.empty()) throw DomainError("no outputs to bind");
  std::vector<ArtifactDigest> sorted = outputs;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.source_name < b.source_name;
  });
  const MerkleTree tree = build_merkle(sorted);
  AibomDocument bound = doc;
  ComponentRecord& root = bound.metadata.component;
  root.remove_property("outputDigest");
  root.remove_property(kOutputArtifactProperty);
  root.set_property(kOutputDigestProperty, tree.root().prefixed());
  for (const auto& d : sorted)
    root.properties->push_back(PropertyEntry{std::string(kOutputArtifactProperty), output_record(d)});
  return bound;
}

}  // namespace aibom

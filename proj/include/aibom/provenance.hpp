#pragma once

// Artifact digests, canonical output-set hashing, and the Merkle tree that
// binds analytic outputs to an AIBOM.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <variant>
#include <vector>

#include "aibom/encoding.hpp"
#include "aibom/model.hpp"

namespace aibom {

struct ArtifactDigest {
  Sha256Digest digest;
  std::string source_name;
  std::uint64_t byte_size = 0;
  std::string mime_type;
  friend bool operator==(const ArtifactDigest&, const ArtifactDigest&) = default;
};

struct HashOptions {
  /// Rewrite CRLF as LF before hashing. Off by default: bytes are hashed as given.
  bool normalize_newlines = false;
};

/// SHA-256 of everything readable from `in`. `byte_size` counts the bytes
/// actually hashed (after optional newline normalisation). Throws IoError if
/// the stream fails before end of file.
ArtifactDigest hash_stream(std::istream& in, std::string source_name, std::string mime_type,
                           const HashOptions& options = {});
ArtifactDigest hash_bytes(std::string_view bytes, std::string source_name,
                          std::string mime_type, const HashOptions& options = {});
ArtifactDigest hash_file(const std::filesystem::path& path, const HashOptions& options = {});

/// MIME type guessed from the file extension; application/octet-stream otherwise.
std::string guess_mime_type(const std::filesystem::path& path);

struct OutputFile {
  std::string name;
  /// In-memory content or a file to stream from.
  std::variant<std::string, std::filesystem::path> content;
  std::string mime_type;
};

OutputFile output_from_path(const std::filesystem::path& path);

/// Hashes each file and returns the digests sorted by name (byte order).
/// Throws DomainError when names repeat.
std::vector<ArtifactDigest> digest_output_set(const std::vector<OutputFile>& files,
                                              const HashOptions& options = {});

struct MerkleTree {
  std::vector<ArtifactDigest> leaves;
  /// levels[0] holds the leaf digests; the last level holds only the root.
  std::vector<std::vector<Sha256Digest>> levels;
  const Sha256Digest& root() const { return levels.back().front(); }
};

enum class Side { kLeft, kRight };

struct ProofStep {
  Sha256Digest sibling;
  Side side;  ///< where the sibling sits relative to the running hash
  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct MerkleProof {
  std::size_t leaf_index = 0;
  std::vector<ProofStep> siblings;
};

/// SHA-256 of the two raw 32-byte digests concatenated.
Sha256Digest hash_pair(const Sha256Digest& left, const Sha256Digest& right);

/// Pairs adjacent nodes level by level; an odd trailing node moves up
/// unchanged. Throws DomainError on an empty leaf list.
MerkleTree build_merkle(std::vector<ArtifactDigest> leaves);
/// Throws DomainError when `index` is out of range.
MerkleProof prove_leaf(const MerkleTree& tree, std::size_t index);
bool verify_proof(const Sha256Digest& root, const ArtifactDigest& leaf, const MerkleProof& proof);

inline constexpr std::string_view kOutputDigestProperty = "x-sacrospec-outputDigest";
inline constexpr std::string_view kOutputArtifactProperty = "x-sacrospec-outputArtifact";

/// Serialised per-file record stored under kOutputArtifactProperty.
std::string output_record(const ArtifactDigest& digest);
std::optional<ArtifactDigest> parse_output_record(std::string_view value);

/// Copy of `doc` whose root component carries the Merkle root of `outputs`
/// as outputDigest plus one output-artifact record per file. Earlier output
/// bindings on the root are replaced. Throws DomainError on empty outputs.
AibomDocument bind_outputs(const AibomDocument& doc, const std::vector<ArtifactDigest>& outputs);

}  // namespace aibom

#include "aibom/io.hpp"

#include <fstream>
#include <sstream>

#include "aibom/crypto.hpp"
#include "aibom/errors.hpp"

namespace aibom {

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  const auto status = std::filesystem::status(path, ec);
  if (ec || !std::filesystem::exists(status))
    throw IoError(path.string() + ": no such file");
  if (std::filesystem::is_directory(status))
    throw IoError(path.string() + ": is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path.string() + ": read failed");
  return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents, bool owner_only) {
  std::array<std::uint8_t, 6> tag{};
  secure_random(tag);
  auto tmp = path;
  tmp += ".tmp-" + to_hex(tag);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string() + ": cannot open for writing");
    if (owner_only) {
      // Restrict before any content is written.
      std::error_code perm_ec;
      std::filesystem::permissions(tmp, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write,
                                   std::filesystem::perm_options::replace, perm_ec);
      if (perm_ec) {
        out.close();
        std::filesystem::remove(tmp);
        throw IoError(tmp.string() + ": cannot restrict permissions");
      }
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError(tmp.string() + ": write failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError(path.string() + ": rename failed: " + ec.message());
  }
}

}  // namespace aibom

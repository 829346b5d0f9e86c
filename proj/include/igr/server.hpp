#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "igr/pipeline.hpp"

namespace igr {

struct ServerOptions {
  std::string address = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> viewer_root;
};

/// HTTP + WebSocket front end over an immutable session.
///   GET  /healthz  -> 200 "ok"
///   GET  /meta     -> dataset name, resolution, reference ids, mesh bounds, view count, intrinsics
///   POST /render   -> image/png, or multipart/mixed with debug layers when "debug" is set
///   POST /camera   -> the camera (cameras.json entry layout) a pose resolves to
///   WS   /stream   -> text pose messages carrying "seq"; binary replies: 8-byte little-endian seq, then PNG
/// Other GET paths are served from the viewer directory when one is configured.
class RenderServer {
 public:
  RenderServer(std::shared_ptr<const SessionState> session, ServerOptions options);
  ~RenderServer();
  RenderServer(const RenderServer&) = delete;
  RenderServer& operator=(const RenderServer&) = delete;

  /// Binds and starts accepting in the background. Throws PortInUse if the port is taken.
  void start();
  /// Bound port (useful with port 0).
  int port() const;
  /// Blocks until stop() is called.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

nlohmann::json session_meta(const SessionState& session);

/// Response of POST /render in the non-debug case: PNG bytes plus the out-of-bounds flag.
struct EncodedRender {
  std::vector<std::uint8_t> png;
  bool out_of_bounds = false;
  std::string content_type = "image/png";
  std::string body;  // multipart body when debug layers were requested
};
EncodedRender encode_render(const SessionState& session, const RenderRequest& request);

}  // namespace igr

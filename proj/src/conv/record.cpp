#include "snet/conv/record.hpp"

#include "snet/error.hpp"

namespace snet::conv {

std::string_view content_type_name(ContentType type) {
  return type == ContentType::kMediaRef ? "MEDIA_REF" : "TEXT_UTF8";
}

ContentType parse_content_type(std::string_view name) {
  if (name == "TEXT_UTF8" || name == "text") return ContentType::kTextUtf8;
  if (name == "MEDIA_REF" || name == "media") return ContentType::kMediaRef;
  fail(ErrorCode::kInvalidArgument, "unknown content type '" + std::string(name) + "'");
}

Bytes encode_record(const MessageRecord& record) {
  if (record.body.size() > 0xFFFFFFFFULL) fail(ErrorCode::kInvalidArgument, "record body too large");
  if (record.timestamp_ms < 0) fail(ErrorCode::kInvalidArgument, "negative timestamp");
  Bytes out;
  out.reserve(kRecordFraming + record.body.size());
  put_be(out, record.body.size(), 4);
  put_be(out, static_cast<std::uint64_t>(record.timestamp_ms), 8);
  out.push_back(static_cast<std::uint8_t>(record.type));
  append(out, record.body);
  return out;
}

std::vector<MessageRecord> decode_records(ByteView log, std::size_t* consumed) {
  std::vector<MessageRecord> out;
  std::size_t pos = 0;
  while (log.size() - pos >= kRecordFraming) {
    const auto len = get_be(log.subspan(pos, 4), 4);
    const auto ts = get_be(log.subspan(pos + 4, 8), 8);
    const auto type = log[pos + 12];
    if (type != 1 && type != 2) break;
    if (ts > static_cast<std::uint64_t>(INT64_MAX)) break;
    if (log.size() - pos - kRecordFraming < len) break;
    const auto body = log.subspan(pos + kRecordFraming, len);
    out.push_back({static_cast<std::int64_t>(ts), static_cast<ContentType>(type), Bytes(body.begin(), body.end())});
    pos += kRecordFraming + len;
  }
  if (consumed) *consumed = pos;
  return out;
}

}  // namespace snet::conv

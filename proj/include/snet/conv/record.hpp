#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "snet/bytes.hpp"

namespace snet::conv {

enum class ContentType : std::uint8_t { kTextUtf8 = 1, kMediaRef = 2 };

std::string_view content_type_name(ContentType type);
ContentType parse_content_type(std::string_view name);

// One entry of a sender's log. The sender is the log's file name, not a field.
struct MessageRecord {
  std::int64_t timestamp_ms = 0;
  ContentType type = ContentType::kTextUtf8;
  Bytes body;  // text bytes, or the relative path of a media file

  bool operator==(const MessageRecord&) const = default;
};

// u32 body length, u64 timestamp, u8 content type; all big-endian.
inline constexpr std::size_t kRecordFraming = 13;

Bytes encode_record(const MessageRecord& record);

// Parses whole records from the front of a log. Parsing stops at a record
// that is still arriving or is malformed; `consumed` receives the number of
// bytes covered by the returned records.
std::vector<MessageRecord> decode_records(ByteView log, std::size_t* consumed = nullptr);

}  // namespace snet::conv

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vsg {

using WarningSink = std::function<void(const std::string&)>;

// Emit a warning through the installed sink (stderr by default).
void warn(const std::string& message);

// Replace the warning sink; returns the previous one. Passing an empty
// function restores the stderr sink.
WarningSink set_warning_sink(WarningSink sink);

// RAII helper that collects warnings for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

}  // namespace vsg

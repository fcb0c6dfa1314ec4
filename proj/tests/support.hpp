#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>

namespace testing {

inline const std::filesystem::path kFixtures = INTENT_FIXTURE_DIR;
inline const std::filesystem::path kSource = INTENT_SOURCE_DIR;

inline std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline const char* kGoldenTrace[] = {
    R"(Execute "find_contact_id" and arguments "insurance company")",
    R"(Execute "find_contact_email" and arguments "1")",
    R"(Execute "find_file_id" and arguments "car title")",
    R"(Execute "send_email" and arguments "john.doe@example.com", "Car Title Submission", )"
    R"("Please find attached the car title for my vehicle.", "[1]")",
};

// The car-title program exactly as the model wrote it, trailing spaces included.
inline constexpr std::string_view kGoldenCode =
    "# Step 1: Define the important variables\n"
    "contact_email_expression = \"insurance company\"\n"
    "email_subject = \"Car Title Submission\"\n"
    "email_text = \"Please find attached the car title for my vehicle.\"\n"
    "attachments = []\n"
    "\n"
    "# Step 2: Find the contact ID for the insurance company\n"
    "contact_id = find_contact_id(contact_email_expression)\n"
    "\n"
    "if contact_id is not None:\n"
    "    # Step 3: Get the email address of the contact\n"
    "    email_address = find_contact_email(contact_id)\n"
    "    \n"
    "    if email_address is not None:\n"
    "        # Step 4: Find the car title file ID\n"
    "        file_expression = \"car title\"\n"
    "        file_id = find_file_id(file_expression)\n"
    "        \n"
    "        if file_id is not None:\n"
    "            attachments.append(file_id)\n"
    "        \n"
    "        # Step 5: Send the email with car title attachment\n"
    "        send_email(email_address, email_subject, email_text, attachments)\n"
    "    else:\n"
    "        print_screen(\"Could not find the email address for the insurance company.\")\n"
    "else:\n"
    "    print_screen(\"Could not find the contact ID for the insurance company.\")\n";

inline constexpr std::string_view kPromptTemplate =
    "You have the following application programming interface:\n"
    "\n"
    "function find_file_id(expression: String): Integer|null\n"
    "function find_contact_id(expression: String): Integer|null\n"
    "function find_contact_email(contact_id: Integer):String|null\n"
    "function play_voice(text: String): void\n"
    "function ask_question(question: String): String\n"
    "function play_audio_file(file: File): void\n"
    "function send_email(email: String, subject: String, text: String, attachments: Collection<Integer>): void\n"
    "function print_screen(text: String): void\n"
    "function shell(command: String): String\n"
    "\n"
    "Write Python 3 code only, which uses the application programming interface for the instruction\n"
    "\"{intention}\"";

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("intent-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void spit(const std::filesystem::path& file, std::string_view text) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream(file, std::ios::binary) << text;
}

// Golden code of the car-title intention, as shipped in the replay corpus.
inline std::string golden_code() { return slurp(kFixtures / "intention-1" / "trial-1.txt"); }

} // namespace testing

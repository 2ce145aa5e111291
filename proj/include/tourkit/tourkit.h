#ifndef TOURKIT_TOURKIT_H
#define TOURKIT_TOURKIT_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(TOURKIT_BUILDING)
#    define TK_API __declspec(dllexport)
#  else
#    define TK_API __declspec(dllimport)
#  endif
#else
#  define TK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tk_status {
  TK_OK = 0,
  TK_INVALID_ARGUMENT = 1,
  TK_IO = 2,
  TK_PARSE = 3,
  TK_VALIDATION = 4,
  TK_DOMAIN = 5,
  TK_UNKNOWN_COMMAND = 6,
  TK_CONFIG = 7,
  TK_INTERNAL = 8
} tk_status;

typedef struct tk_config tk_config;
typedef struct tk_tree tk_tree;

TK_API const char* tk_version(void);
TK_API const char* tk_status_name(tk_status status);

/* Message of the last failed call on this thread; empty after a success. */
TK_API const char* tk_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
TK_API void tk_string_free(char* text);

TK_API tk_status tk_config_new(tk_config** out);
TK_API tk_status tk_config_load(const char* path, tk_config** out);
TK_API tk_status tk_config_from_json(const char* json, tk_config** out);
/* key_path is dotted ("rulemine.min_support"); value is JSON text ("0.05"). */
TK_API tk_status tk_config_set(tk_config* config, const char* key_path, const char* json_value);
TK_API tk_status tk_config_to_json(const tk_config* config, char** out);
TK_API void tk_config_free(tk_config* config);

/* Runs one of synth, fuse, congest, features, segment, train, eval, impact,
   report. *summary receives a JSON object with the stage name, a one-line
   summary, artifact paths and warnings. summary may be NULL. */
TK_API tk_status tk_run_stage(const tk_config* config, const char* stage, char** summary);

TK_API tk_status tk_tree_load(const char* path, tk_tree** out);
/* Predicts one row given n (attribute, level) pairs. Attributes not given are
   routed through the fallback child. *out receives a JSON object. */
TK_API tk_status tk_tree_predict(const tk_tree* tree, size_t n, const char* const* attributes,
                                 const char* const* levels, char** out);
TK_API void tk_tree_free(tk_tree* tree);

#ifdef __cplusplus
}
#endif

#endif

#include <stdio.h>
#include <string.h>

#include "adk.h"

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      const char *e = adk_last_error();                           \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,     \
              #cond, e ? e : "no error");                         \
      return 1;                                                   \
    }                                                             \
  } while (0)

static const char *TWO_NODE =
    "model gt\nn 2\nnodes u v\nedge u v\ntable v\n  {} 0\n  {u} 1/2\n";

int main(void) {
  AdkInstance *inst = NULL;
  EXPECT(adk_instance_parse(TWO_NODE, &inst) == ADK_STATUS_OK);
  char *sigma = NULL;
  EXPECT(adk_exact_spread(inst, 1, 0, &sigma) == ADK_STATUS_OK);
  printf("sigma=%s\n", sigma);
  adk_string_free(sigma);

  AdkInstance *tr = NULL;
  EXPECT(adk_instance_convert(inst, ADK_MODEL_TRIGGERING, &tr) == ADK_STATUS_OK);
  double mean = 0, err = 0;
  EXPECT(adk_monte_carlo_spread(tr, 1, 1000, 3, &mean, &err) == ADK_STATUS_OK);
  EXPECT(mean > 1.0 && mean < 2.0);
  adk_instance_free(tr);
  adk_instance_free(inst);

  int64_t num[4] = {0, 1, 1, 1};
  int64_t den[4] = {1, 4, 4, 1};
  AdkSetFunction *f = NULL;
  EXPECT(adk_setfn_new(2, num, den, &f) == ADK_STATUS_OK);
  AdkCheck check;
  EXPECT(adk_setfn_check(f, 2, &check) == ADK_STATUS_OK);
  printf("check holds=%d s=%u a=%u\n", check.holds, check.witness_s, check.witness_a);
  adk_setfn_free(f);

  EXPECT(adk_instance_parse("model gt\nn x\n", &inst) == ADK_STATUS_PARSE);
  EXPECT(adk_last_error() != NULL && strstr(adk_last_error(), "line 2") != NULL);
  EXPECT(strlen(adk_version()) > 0);
  return 0;
}

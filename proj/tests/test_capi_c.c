/* Smoke test: the public header must compile and link from plain C. */
#include <stdio.h>
#include <string.h>

#include "lidarprop.h"

int main(void) {
  int failures = 0;

  if (strlen(lrp_version()) == 0) {
    fprintf(stderr, "empty version string\n");
    ++failures;
  }
  if (strcmp(lrp_status_name(LRP_OK), "ok") != 0) {
    fprintf(stderr, "bad status name for LRP_OK\n");
    ++failures;
  }

  lrp_config *config = NULL;
  if (lrp_config_create(&config) != LRP_OK) {
    fprintf(stderr, "lrp_config_create failed\n");
    return 1;
  }
  char value[32];
  if (lrp_config_get(config, "dbscan.min_pts", value, sizeof(value)) != LRP_OK ||
      strcmp(value, "10") != 0) {
    fprintf(stderr, "unexpected dbscan.min_pts default: %s\n", value);
    ++failures;
  }
  if (lrp_config_set(config, "no.such.key", "1") != LRP_ERR_CONFIG) {
    fprintf(stderr, "unknown key did not raise a config error\n");
    ++failures;
  }
  if (strlen(lrp_last_error()) == 0) {
    fprintf(stderr, "last error not populated\n");
    ++failures;
  }
  lrp_config_free(config);
  lrp_config_free(NULL); /* no-op by contract */

  if (failures == 0) printf("capi_c_smoke: ok\n");
  return failures == 0 ? 0 : 1;
}

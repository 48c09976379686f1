#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hom_negativity.h"

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond);  \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  HomState *singlet = NULL;
  CHECK(hom_state_bell(HOM_BELL_PSI_MINUS, &singlet) == HOM_STATUS_OK);

  double n = -1.0;
  CHECK(hom_negativity(singlet, &n) == HOM_STATUS_OK);
  CHECK(fabs(n - 1.0) < 1e-9);

  double det = 0.0;
  bool entangled = false;
  CHECK(hom_witness(singlet, &det, &entangled) == HOM_STATUS_OK);
  CHECK(fabs(det + 0.0625) < 1e-12 && entangled);

  double g[13];
  CHECK(hom_g_table(singlet, g) == HOM_STATUS_OK);
  CHECK(fabs(g[0] - 1.0) < 1e-12);

  double probs[16];
  CHECK(hom_outcome_distribution(singlet, 'c', probs) == HOM_STATUS_OK);
  double total = 0.0;
  for (int i = 0; i < 16; i++) total += probs[i];
  CHECK(fabs(total - 1.0) < 1e-12);
  CHECK(hom_outcome_distribution(singlet, 'e', probs) == HOM_STATUS_UNKNOWN_CONFIGURATION);

  HomState *bad = NULL;
  CHECK(hom_state_werner(1.5, &bad) == HOM_STATUS_INVALID_PARAMETER);
  CHECK(bad == NULL);
  CHECK(hom_last_error_message() != NULL);

  double diag[32] = {0};
  diag[0] = 0.6;
  diag[2 * 5] = 0.6;
  diag[2 * 10] = -0.1;
  diag[2 * 15] = -0.1;
  CHECK(hom_state_from_matrix(diag, &bad) == HOM_STATUS_INVALID_STATE);

  hom_state_free(singlet);
  hom_state_free(NULL);
  printf("ok %s\n", hom_version());
  return 0;
}

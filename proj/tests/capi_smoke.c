/* Compiled as C to check the header is consumable from plain C. */
#include <ltree.h>

#include <stdio.h>

int main(void) {
  const double rho[9] = {1.0, 0.9, 0.5, 0.9, 1.0, 0.8, 0.5, 0.8, 1.0};
  ltree_matrix* sigma = NULL;
  ltree_tree_result* tree = NULL;
  size_t u = 0, v = 0;
  if (ltree_matrix_create(3, 3, rho, &sigma) != LTREE_OK) return 1;
  if (ltree_chow_liu(sigma, &tree) != LTREE_OK) {
    fprintf(stderr, "%s\n", ltree_last_error());
    return 1;
  }
  if (ltree_tree_num_edges(tree) != 2) return 1;
  if (ltree_tree_edge(tree, 1, &u, &v) != LTREE_OK || u != 1 || v != 2) return 1;
  printf("ltree %s: kl %.6f\n", ltree_version(), ltree_tree_kl(tree));
  ltree_tree_result_free(tree);
  ltree_matrix_free(sigma);
  return 0;
}

#include <petsc.h>

int main(int argc, char** argv) {
  Vec x;
  PetscMPIInt rank;
  PetscCall(PetscInitialize(&argc, &argv, NULL, NULL));
  PetscCall(VecCreate(PETSC_COMM_WORLD, &x));
  MPI_Comm_rank(PETSC_COMM_WORLD, &rank);
  if (rank == 0) {
    PetscCall(VecAssemblyBegin(x));
  }
  PetscCall(VecAssemblyEnd(x));
  PetscCall(VecDestroy(&x));
  PetscCall(PetscFinalize());
  return 0;
}

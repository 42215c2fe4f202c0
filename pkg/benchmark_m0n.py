import timeit

from TropIntersect.matroids import bergman_fan_rincon, complete_graph_matroid
from TropIntersect.moduli import enumerate_m0n_cones, m0n, pruefer_to_curve


def run_benchmark(n: int = 6, number: int = 3):
    graphic = complete_graph_matroid(n - 1)

    time_bergman = timeit.timeit(lambda: bergman_fan_rincon(graphic), number=number)
    time_pruefer = timeit.timeit(lambda: m0n(n), number=number)
    time_types = timeit.timeit(lambda: [pruefer_to_curve(s) for s in enumerate_m0n_cones(n)], number=number)

    print(f"M0,{n} as Bergman fan of K_{n - 1}: {time_bergman / number:.4f}s")
    print(f"M0,{n} from Pruefer sequences: {time_pruefer / number:.4f}s")
    print(f"  of which decoding the types: {time_types / number:.4f}s")
    print(f"Speedup: {time_bergman / time_pruefer:.2f}x")


if __name__ == "__main__":
    run_benchmark()

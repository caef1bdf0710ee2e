"""Configuration for surface_laplacian."""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Настройки вычислений и CLI."""

    # Limits
    crsf_max_edges: int = 24  # Максимум рёбер для полного перебора CRSF (формула Формана)
    exponent_limit: int = 2**31 - 1  # Граница модуля показателя монома

    # Parallelism
    parallel_workers: int = 1  # Число потоков для перебора CRSF и верхнего шага skein-рекурсии (1 = последовательно)

    # CLI settings
    log_level: str = "WARNING"  # Уровень логирования CLI
    report_format: str = "human"  # Формат отчёта по умолчанию: human или machine
    report_timing: bool = False  # Добавлять timing_ms в отчёт (отключено, чтобы отчёты были побайтно воспроизводимы)
    selftest_random_graphs: int = 200  # Размер случайного корпуса для команды selftest

    class Config:
        env_file = ".env"  # Загружать настройки из .env файла
        env_prefix = "SURFACE_LAPLACIAN_"  # Префикс для переменных окружения


# Создаем глобальный экземпляр настроек
settings = Settings()

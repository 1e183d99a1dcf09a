from pydantic import BaseModel


class Config(BaseModel):
    APP_TITLE: str = "ralab"
    DEBUG: bool = False
    LOG_INFO: bool = True


def get_ralab_config() -> Config:
    return Config()

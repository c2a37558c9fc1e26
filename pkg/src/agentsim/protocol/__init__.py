from .codec import (
    BatchPayload,
    ErrorMsg,
    Hello,
    HelloAck,
    MalformedBody,
    Ping,
    ResetRequest,
    SideChannel,
    StepRequest,
    StepResponse,
    Truncated,
    UnknownType,
    decode_message,
    encode_message,
)
from .demo import DemoFile, DemoRecord, read_demo, write_demo
from .server import serve

__all__ = [
    "BatchPayload", "ErrorMsg", "Hello", "HelloAck", "MalformedBody",
    "Ping", "ResetRequest", "SideChannel", "StepRequest", "StepResponse",
    "Truncated", "UnknownType", "decode_message", "encode_message",
    "DemoFile", "DemoRecord", "read_demo", "write_demo", "serve",
]

#include <nan.h>

using namespace v8;

NAN_METHOD(GenSaltSync) {
    if (info.Length() < 1 || !info[0]->IsNumber()) {
        return Nan::ThrowError("rounds must be a number");
    }
    int rounds = info[0]->ToInt32()->Value();
    info.GetReturnValue().Set(Nan::New<Number>(rounds));
}

void Init(Local<Object> exports) {
    Nan::Set(exports, Nan::New<String>("gen_salt_sync").ToLocalChecked(),
             Nan::GetFunction(Nan::New<FunctionTemplate>(GenSaltSync))
                 .ToLocalChecked());
}

NODE_MODULE(bcrypt, Init)
